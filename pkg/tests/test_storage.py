"""
结果表与元数据存储
"""

import pandas as pd
import pytest

from flexcast.config.constants import RESULT_COLUMNS
from flexcast.storage import ResultStore
from flexcast.utils.exceptions import StorageError


def result_table(n=2) -> pd.DataFrame:
    rows = []
    for i in range(n):
        rows.append({
            'date': "2023-06-01", 'category': "all", 'bau': "cost_min", 'v2g': bool(i % 2),
            'product': "redispatch", 'window_start': "17:00", 'window_len': 1.0, 'lead_h': 1.0,
            'magnitude_kw': 12.5 + i / 3.0, 'cost_delta': 0.1, 'emission_delta': float('nan'),
            'status': "optimal", 'n_transactions': 5, 'message': "",
        })
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


class TestResultStore:
    def test_metadata_path_replaces_extension(self):
        assert ResultStore().metadata_path("out/results.csv").name == "results.meta.json"

    def test_write_and_load(self, tmp_path):
        store = ResultStore()
        output = tmp_path / "nested" / "results.csv"
        store.write_results(result_table(), output, {"seed": 7, "dates": ["2023-06-01"]})

        lines = output.read_text(encoding='utf-8').splitlines()
        assert lines[0] == ",".join(RESULT_COLUMNS)
        assert "12.833333" in lines[2]

        table = store.load_results(output)
        assert list(table['v2g']) == [False, True]
        assert list(table['message']) == ["", ""]
        assert table['date'].iloc[0] == "2023-06-01"
        assert table['emission_delta'].isna().all()
        assert store.load_metadata(output) == {"seed": 7, "dates": ["2023-06-01"]}

    def test_custom_float_format(self, tmp_path):
        output = ResultStore(float_format="%.2f").write_table(result_table(1), tmp_path / "r.csv")
        assert ",12.50," in output.read_text(encoding='utf-8')

    def test_missing_file(self, tmp_path):
        with pytest.raises(StorageError):
            ResultStore().load_results(tmp_path / "none.csv")
        with pytest.raises(StorageError):
            ResultStore().load_metadata(tmp_path / "none.csv")

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "partial.csv"
        result_table().drop(columns=['status']).to_csv(path, index=False)
        with pytest.raises(StorageError) as excinfo:
            ResultStore().load_results(path)
        assert "status" in str(excinfo.value)

    def test_default_output_under_workspace(self):
        path = ResultStore().default_output("sweep.csv")
        assert path.parts[-2:] == ("results", "sweep.csv")
