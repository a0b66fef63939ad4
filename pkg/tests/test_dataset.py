from datetime import datetime, timedelta

import numpy as np
import pytest

from tsmine import DegenerateDataError, InputError, TimeSeries
from tsmine.dataset import (
    AHU_LABELS,
    FEATURES,
    LOG_COLUMNS,
    Dataset,
    FeatureRow,
    SensorLog,
    SeasonCalendar,
    SynthConfig,
    build_features,
    build_reduced,
    channel_name,
    day_windows,
    generate_synthetic,
    read_log,
    standardized_features,
    write_log,
)
from tsmine.paasax import cell_means, gaussian_breakpoints, paa_transform


@pytest.fixture(scope="module")
def year_log():
    return generate_synthetic(SynthConfig(days=359), seed=1)


def test_table_row_shape(tmp_path):
    row = [0.2501, 0.4406, 0.8710, 0.7291, 1, 1, 0, 0]
    ds = Dataset(np.array([row]), [1], "paa")
    (r,) = list(ds.rows())
    assert r == FeatureRow(0.2501, 0.4406, 0.8710, 0.7291, 1, 1, 0, 0, 1)
    ds.to_csv(tmp_path / "d.csv")
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines == ["evac,in,rec,ext,iswkn,iswinter,issummer,isshoulder,class",
                     "0.2501,0.4406,0.871,0.7291,1,1,0,0,1"]


@pytest.mark.parametrize("stamp,expected", [
    ("2017-01-07T10:00", [1, 1, 0, 0]),   # Saturday in January
    ("2017-01-08T23:55", [1, 1, 0, 0]),   # Sunday
    ("2017-01-09T00:00", [0, 1, 0, 0]),   # Monday
    ("2017-07-12T12:00", [0, 0, 1, 0]),
    ("2017-04-03T08:00", [0, 0, 0, 1]),
    ("2017-10-21T08:00", [1, 0, 0, 1]),
    ("2016-12-01T00:00", [0, 1, 0, 0]),
])
def test_calendar_flags(stamp, expected):
    flags = SeasonCalendar().flags(np.array([stamp], dtype="datetime64[s]"))
    assert flags[0].tolist() == expected


def test_calendar_against_python_weekday():
    start = datetime(2016, 11, 3)
    stamps = [start + timedelta(hours=7 * i) for i in range(2000)]
    flags = SeasonCalendar().flags(np.array(stamps, dtype="datetime64[s]"))
    assert flags[:, 0].tolist() == [float(s.weekday() >= 5) for s in stamps]
    assert flags[:, 1].tolist() == [float(s.month in (12, 1, 2)) for s in stamps]


def test_proc_rows(small_clean):
    ds = build_features(small_clean)
    assert len(ds) == len(small_clean) * 4
    assert ds.variant == "proc"
    assert ds.labels[:8].tolist() == [1, 2, 3, 5, 1, 2, 3, 5]


def test_one_hot_season(small_clean):
    for ds in (build_features(small_clean), build_reduced(small_clean, variant="sax")):
        assert np.all(ds.features[:, 5:].sum(axis=1) == 1)
        assert set(np.unique(ds.labels)) <= set(AHU_LABELS)


def test_z_columns(small_clean):
    X = build_features(small_clean).features[:, :4]
    np.testing.assert_allclose(X.mean(axis=0), 0.0, atol=1e-6)
    np.testing.assert_allclose(X.std(axis=0, ddof=1), 1.0, atol=1e-6)


def test_reduced_row_counts(year_log):
    paa = build_reduced(year_log, 10, 6, "paa")
    sax = build_reduced(year_log, 10, 6, "sax")
    assert len(paa) == len(sax) == 359 * 4 * 10 == 14360
    proc_rows = len(year_log) * 4
    assert proc_rows / len(paa) == pytest.approx(28.8)


def test_paa_rows_match_paasax(small_log):
    ds = build_reduced(small_log, 10, 6, "paa")
    z, ext = standardized_features(small_log)
    starts, per_day = day_windows(small_log.ext)
    X = ds.features.reshape(starts.size, 10, 4, len(FEATURES))
    for d, s in enumerate(starts):
        for j, u in enumerate(small_log.units):
            for c, m in enumerate(("evac", "in", "rec")):
                np.testing.assert_array_equal(
                    X[d, :, j, c], paa_transform(z[u, m][s:s + per_day], 10).segments)
        np.testing.assert_array_equal(X[d, :, 0, 3], paa_transform(ext[s:s + per_day], 10).segments)


def test_sax_values_are_cell_means(small_log):
    ds = build_reduced(small_log, 10, 6, "sax")
    assert set(np.unique(ds.features[:, :4])) <= set(cell_means(gaussian_breakpoints(6)))


def test_fine_alphabet_sax_close_to_paa(small_log):
    paa = build_reduced(small_log, 10, 256, "paa").features[:, :4]
    sax = build_reduced(small_log, 10, 256, "sax").features[:, :4]
    bp = gaussian_breakpoints(256)
    edges = np.r_[-np.inf, bp, np.inf]
    cell = np.searchsorted(bp, paa, side="right")
    inside = (cell > 0) & (cell < 255)
    width = edges[cell + 1] - edges[cell]
    assert np.all(np.abs(sax - paa)[inside] <= width[inside])
    assert np.max(np.abs(sax - paa)[inside]) < 0.1


def test_reduced_flags_from_segment_start(small_log):
    ds = build_reduced(small_log, 10, 6, "paa")
    first = ds.timestamps[0]
    assert str(first) == "2017-01-07T00:00:00"
    assert ds.features[0, 4:].tolist() == [1, 1, 0, 0]


def test_reduced_window_too_short(small_log):
    with pytest.raises(InputError):
        build_reduced(small_log, 300, 6, "paa")


def test_empirical_breakpoint_mode(small_log):
    ds = build_reduced(small_log, 10, 6, "sax", breakpoints="empirical")
    assert len(ds) == 6 * 4 * 10


def test_time_base_mismatch(small_log):
    ch = dict(small_log.channels)
    ch["ahu1_evac"] = TimeSeries(ch["ahu1_evac"].values, step=60.0, channel_id="ahu1_evac")
    with pytest.raises(InputError):
        SensorLog(ch)


def test_constant_channel_is_degenerate(small_log):
    ch = dict(small_log.channels)
    for u in AHU_LABELS:
        name = channel_name(u, "rec")
        ch[name] = ch[name].with_values(np.full(len(small_log), 20.0))
    with pytest.raises(DegenerateDataError):
        build_features(SensorLog(ch))


def test_synthetic_layout(small_log):
    assert tuple(small_log.channels) == LOG_COLUMNS
    assert len(small_log) == 6 * 288
    assert small_log.units == (1, 2, 3, 5)


def test_synthetic_deterministic():
    a = generate_synthetic(SynthConfig(days=3), seed=9)
    b = generate_synthetic(SynthConfig(days=3), seed=9)
    c = generate_synthetic(SynthConfig(days=3), seed=10)
    for name in LOG_COLUMNS:
        np.testing.assert_array_equal(a[name].values, b[name].values)
    assert not np.array_equal(a["ext_temp"].values, c["ext_temp"].values)


def test_dropout_rate_bounded():
    for seed in range(10):
        log = generate_synthetic(SynthConfig(days=20), seed=seed)
        zeros = sum(int(np.sum(ts.values == 0.0)) for ts in log.channels.values())
        total = sum(len(ts) for ts in log.channels.values())
        assert zeros / total <= 0.001


def test_ahu3_coldest(year_log):
    means = {u: year_log[channel_name(u, "evac")].values.mean() for u in AHU_LABELS}
    assert min(means, key=means.get) == 3


def test_synth_config_validation():
    with pytest.raises(InputError):
        SynthConfig(days=0)
    with pytest.raises(InputError):
        SynthConfig(dropout_rate=0.01)
    with pytest.raises(InputError):
        SynthConfig(step=7.0)


def test_log_round_trip(tmp_path, small_log):
    write_log(small_log, tmp_path / "log.csv")
    back = read_log(tmp_path / "log.csv")
    assert tuple(back.channels) == LOG_COLUMNS
    for name in LOG_COLUMNS:
        np.testing.assert_array_equal(back[name].values, small_log[name].values)
        assert back[name].same_time_base(small_log[name])


def test_read_log_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("timestamp,a\n2017-01-01T00:00:00,1.0\n2017-01-01T00:05:00,x\n")
    with pytest.raises(InputError):
        read_log(p)
    p.write_text("timestamp,a\n2017-01-01T00:00:00,1\n2017-01-01T00:05:00,1\n"
                 "2017-01-01T00:20:00,1\n")
    with pytest.raises(InputError):
        read_log(p)
    with pytest.raises(InputError):
        read_log(tmp_path / "none.csv")


def test_dataset_csv_round_trip(tmp_path, small_clean):
    ds = build_reduced(small_clean, 10, 6, "sax")
    ds.to_csv(tmp_path / "d.csv")
    back = Dataset.from_csv(tmp_path / "d.csv", "sax")
    np.testing.assert_array_equal(back.features, ds.features)
    np.testing.assert_array_equal(back.labels, ds.labels)


def test_dataset_validation():
    with pytest.raises(InputError):
        Dataset(np.zeros((0, 8)), [], "proc")
    with pytest.raises(InputError):
        Dataset(np.zeros((2, 7)), [1, 2], "proc")
    with pytest.raises(InputError):
        Dataset(np.zeros((1, 8)), [1], "raw")
