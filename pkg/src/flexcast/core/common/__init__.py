"""
公共组件
"""

from .events import EventBus, Job, JobOutcome, JobQueue
