"""
Time grid and transaction ingestion module
"""

from .models import ChargerCategory, DiscretizationReport, Excluded, RawTransaction, TimeGrid, Transaction
from .ingest import discretize, discretize_all, format_transactions, parse_transactions, sample_day, write_transactions
