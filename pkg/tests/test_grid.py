"""
时间网格、充电记录解析与离散化
"""

import io
from datetime import date, datetime

import pytest

from flexcast.config.constants import MAX_CONNECTION_STEPS
from flexcast.core.grid import (
    ChargerCategory,
    Excluded,
    TimeGrid,
    Transaction,
    discretize,
    discretize_all,
    format_transactions,
    parse_transactions,
    sample_day,
    write_transactions,
)
from flexcast.utils.exceptions import ConfigError, HorizonError, TransactionParseError, ValidationError

from conftest import ANCHOR, make_tx, raw_session

HEADER = "station_id,category,arrival,departure,energy_kwh,max_power_kw\n"


class TestTimeGrid:
    def test_three_day_horizon(self):
        grid = TimeGrid.for_day(ANCHOR)
        assert grid.n_steps == 288
        assert grid.start_offset_steps == 96
        assert grid.start == datetime(2023, 5, 31)
        assert grid.end == datetime(2023, 6, 3)
        assert grid.anchor_day_steps() == range(96, 192)

    def test_clock_and_hour_mapping(self):
        grid = TimeGrid.for_day(ANCHOR)
        step = grid.step_of_clock(17, 0)
        assert step == 96 + 68
        assert grid.hour_of_day(step) == 17
        assert grid.date_of(step) == ANCHOR
        assert grid.date_of(0) == date(2023, 5, 31)

    def test_round_half_up(self):
        grid = TimeGrid.for_day(ANCHOR)
        assert grid.round_to_step(datetime(2023, 6, 1, 8, 7, 29)) == 96 + 32
        assert grid.round_to_step(datetime(2023, 6, 1, 8, 7, 30)) == 96 + 33

    def test_rejects_other_step_sizes(self):
        with pytest.raises(ValidationError):
            TimeGrid(ANCHOR, step_minutes=30)


class TestParseTransactions:
    def test_single_valid_row(self):
        text = HEADER + "RES-0001,residential,2023-06-01T08:07:00,2023-06-01T10:08:00,5,11\n"
        raws = parse_transactions(io.StringIO(text))
        assert len(raws) == 1
        assert raws[0].category is ChargerCategory.RESIDENTIAL
        assert raws[0].energy_kwh == 5.0

    def test_header_only(self):
        assert parse_transactions(io.StringIO(HEADER)) == []

    def test_bytes_input(self):
        text = HEADER + "COM-0001,commercial,2023-06-01T08:00:00,2023-06-01T09:00:00,2.5,11\n"
        assert len(parse_transactions(text.encode('utf-8'))) == 1

    def test_departure_before_arrival_names_row(self):
        text = (HEADER
                + "RES-0001,residential,2023-06-01T08:00:00,2023-06-01T09:00:00,2,11\n"
                + "RES-0002,residential,2023-06-01T10:00:00,2023-06-01T09:00:00,2,11\n")
        with pytest.raises(TransactionParseError) as excinfo:
            parse_transactions(io.StringIO(text))
        errors = excinfo.value.errors
        assert len(errors) == 1
        assert (errors[0]["line"], errors[0]["field"]) == (3, "departure")
        assert excinfo.value.error_code == "TRANSACTION_PARSE_ERROR"

    def test_reports_every_bad_row(self):
        text = (HEADER
                + "RES-0001,residential,not-a-date,2023-06-01T09:00:00,2,11\n"
                + "RES-0002,residential,2023-06-01T08:00:00,2023-06-01T09:00:00,-1,11\n"
                + "RES-0003,garage,2023-06-01T08:00:00,2023-06-01T09:00:00,1,11\n")
        with pytest.raises(TransactionParseError) as excinfo:
            parse_transactions(io.StringIO(text))
        fields = [(e["line"], e["field"]) for e in excinfo.value.errors]
        assert fields == [(2, "arrival"), (3, "energy_kwh"), (4, "category")]

    def test_missing_column(self):
        text = "station_id,category,arrival,departure,energy_kwh\n"
        with pytest.raises(TransactionParseError) as excinfo:
            parse_transactions(io.StringIO(text))
        assert excinfo.value.errors[0]["field"] == "max_power_kw"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_transactions(str(tmp_path / "missing.csv"))

    def test_write_then_parse_keeps_fields(self):
        raws = [raw_session("RES-0001", "2023-06-01T17:40:00", "2023-06-02T07:10:00", 12.5, 11.0)]
        buffer = io.StringIO()
        write_transactions(raws, buffer)
        assert buffer.getvalue().splitlines()[1] == \
            "RES-0001,residential,2023-06-01T17:40:00,2023-06-02T07:10:00,12.500,11"
        assert parse_transactions(io.StringIO(buffer.getvalue())) == raws
        assert list(format_transactions([]).columns) == HEADER.strip().split(",")


class TestDiscretize:
    def test_rounds_to_nearest_quarter(self):
        grid = TimeGrid.for_day(ANCHOR)
        raw = raw_session("RES-0001", "2023-06-01T08:07:00", "2023-06-01T10:08:00", 5.0, 11.0)
        tx = discretize(raw, grid, v2g=False)
        assert isinstance(tx, Transaction)
        assert grid.step_start(tx.arrive_step) == datetime(2023, 6, 1, 8, 0)
        assert grid.step_start(tx.depart_step) == datetime(2023, 6, 1, 10, 15)
        assert tx.p_min_kw == 0.0

    def test_insufficient_connection_time(self):
        grid = TimeGrid.for_day(ANCHOR)
        raw = raw_session("RES-0001", "2023-06-01T08:00:00", "2023-06-01T08:10:00", 5.0, 11.0)
        result = discretize(raw, grid, v2g=False)
        assert isinstance(result, Excluded)
        assert result.reason == "insufficient_connection_time"
        assert result.depart_step - result.arrive_step == 1

    def test_zero_duration(self):
        grid = TimeGrid.for_day(ANCHOR)
        raw = raw_session("RES-0001", "2023-06-01T08:00:00", "2023-06-01T08:05:00", 0.5, 11.0)
        result = discretize(raw, grid, v2g=False)
        assert isinstance(result, Excluded)
        assert result.reason == "zero_duration"

    def test_long_connection_is_capped(self):
        grid = TimeGrid.for_day(ANCHOR)
        raw = raw_session("RES-0001", "2023-05-31T06:00:00", "2023-06-01T12:00:00", 20.0, 11.0)
        tx = discretize(raw, grid, v2g=False)
        assert tx.depart_step == tx.arrive_step + MAX_CONNECTION_STEPS

    def test_v2g_lower_bound(self):
        grid = TimeGrid.for_day(ANCHOR)
        raw = raw_session("RES-0001", "2023-06-01T18:00:00", "2023-06-01T22:00:00", 10.0, 7.4)
        tx = discretize(raw, grid, v2g=True)
        assert tx.p_min_kw == -7.4
        assert tx.is_v2g

    def test_out_of_horizon(self):
        grid = TimeGrid.for_day(ANCHOR)
        raw = raw_session("RES-0001", "2023-06-05T08:00:00", "2023-06-05T10:00:00", 5.0, 11.0)
        with pytest.raises(HorizonError):
            discretize(raw, grid, v2g=False)

    def test_discretize_all_counts(self):
        grid = TimeGrid.for_day(ANCHOR)
        raws = [
            raw_session("RES-0001", "2023-05-29T08:00:00", "2023-05-29T10:00:00", 5.0),
            raw_session("RES-0002", "2023-06-01T08:00:00", "2023-06-01T10:00:00", 5.0),
            raw_session("RES-0003", "2023-06-01T09:00:00", "2023-06-01T09:10:00", 5.0),
        ]
        report = discretize_all(raws, grid, v2g=False)
        assert report.out_of_horizon == 1
        assert [tx.id for tx in report.transactions] == [0]
        assert len(report.excluded) == 1
        assert report.exclusion_rate == pytest.approx(0.5)


class TestSampleDay:
    def test_keeps_anchor_and_previous_day(self):
        grid = TimeGrid.for_day(ANCHOR)
        previous = make_tx(40, 80, 5.0, tx_id=0)
        anchor = make_tx(130, 140, 5.0, tx_id=1)
        after = make_tx(200, 220, 5.0, tx_id=2)
        selected = sample_day([after, anchor, previous], grid)
        assert [tx.id for tx in selected] == [0, 1]

    def test_earlier_days_never_reach_the_grid(self):
        grid = TimeGrid.for_day(ANCHOR)
        raw = raw_session("RES-0001", "2023-05-30T12:00:00", "2023-05-30T14:00:00", 5.0)
        report = discretize_all([raw], grid, v2g=False)
        assert sample_day(report.transactions, grid) == []

    def test_late_arrival_rounding_to_midnight_stays_in_sample(self):
        grid = TimeGrid.for_day(ANCHOR)
        late = raw_session("RES-0001", "2023-06-01T23:53:00", "2023-06-02T06:00:00", 10.0)
        next_day = raw_session("RES-0002", "2023-06-02T00:05:00", "2023-06-02T06:00:00", 10.0)
        report = discretize_all([late, next_day], grid, v2g=False)
        assert [tx.arrive_step for tx in report.transactions] == [192, 192]
        selected = sample_day(report.transactions, grid)
        assert [tx.station_id for tx in selected] == ["RES-0001"]

    def test_arrival_timestamp_does_not_affect_equality(self):
        grid = TimeGrid.for_day(ANCHOR)
        raw = raw_session("RES-0001", "2023-06-01T08:00:00", "2023-06-01T10:00:00", 5.0)
        tx = discretize(raw, grid, v2g=False)
        assert tx.arrival == raw.arrival
        assert tx == make_tx(128, 136, 5.0, tx_id=0)

    def test_orders_by_arrival_then_id(self):
        grid = TimeGrid.for_day(ANCHOR)
        txs = [make_tx(120, 130, 1.0, tx_id=3), make_tx(110, 130, 1.0, tx_id=5), make_tx(120, 125, 1.0, tx_id=1)]
        assert [tx.id for tx in sample_day(txs, grid)] == [5, 1, 3]


class TestTransactionModel:
    def test_rejects_unreachable_energy(self):
        with pytest.raises(ValidationError):
            make_tx(0, 1, 3.0, p_max=11.0)

    def test_rejects_overlong_connection(self):
        with pytest.raises(ValidationError):
            make_tx(0, MAX_CONNECTION_STEPS + 1, 1.0)
