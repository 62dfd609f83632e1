"""
Tests for drive-test measurement ingestion.
"""

import numpy as np
import pytest

from src.errors import DimensionError, MeasurementFormatError
from src.processing.measurement_ingestion import MeasurementIngestor, MeasurementRecord, ingest_measurements

HEADER = "grid_id,cell_id,beam_id,rsrp_db,timestamp\n"


def _csv(*rows):
    return (HEADER + "".join(row + "\n" for row in rows)).encode()


def test_equal_samples_average_to_same_level():
    [measurement] = ingest_measurements(_csv("g1,c1,b0,-60,", "g1,c1,b0,-60,"))
    assert measurement.mean_db[0] == pytest.approx(-60.0)
    assert measurement.counts.tolist() == [2]


def test_averaging_is_linear():
    [measurement] = ingest_measurements(_csv("g1,c1,b0,-50,", "g1,c1,b0,-70,"))
    assert measurement.mean_linear[0] == pytest.approx(5.05e-6)
    assert measurement.mean_db[0] == pytest.approx(-52.967, abs=1e-3)


def test_five_beam_report_keeps_beam_levels():
    rows = ["g1,c1,SSB-0,-78.4,", "g1,c1,SSB-1,-66.2,", "g1,c1,SSB-2,-61.9,", "g1,c1,SSB-3,-59.61,", "g1,c1,SSB-4,-70.05,"]
    labels = ["SSB-0", "SSB-1", "SSB-2", "SSB-3", "SSB-4"]
    [measurement] = ingest_measurements(_csv(*rows), beam_labels=labels)
    assert measurement.mask.all()
    assert int(np.nanargmax(measurement.mean_db)) == 3
    np.testing.assert_allclose(measurement.mean_db, [-78.4, -66.2, -61.9, -59.61, -70.05], atol=1e-9)


def test_row_order_does_not_matter(tmp_path):
    rows = ["g2,c1,b1,-71.5,", "g1,c1,b0,-60,", "g1,c1,b1,-65.25,", "g1,c1,b0,-62,", "g2,c1,b0,-80,", "g1,c2,b0,-90,"]
    forward = ingest_measurements(_csv(*rows))
    path = tmp_path / "shuffled.csv"
    path.write_bytes(_csv(*reversed(rows)))
    backward = ingest_measurements(path)

    assert [(m.grid_id, m.cell_id) for m in forward] == [("g1", "c1"), ("g1", "c2"), ("g2", "c1")]
    for a, b in zip(forward, backward):
        assert (a.grid_id, a.cell_id, a.beam_labels) == (b.grid_id, b.cell_id, b.beam_labels)
        np.testing.assert_array_equal(a.mean_linear, b.mean_linear)
        np.testing.assert_array_equal(a.counts, b.counts)


def test_missing_beams_are_masked():
    [measurement] = ingest_measurements(_csv("g1,c1,b0,-60,", "g1,c1,b2,-70,"), beam_labels=["b0", "b1", "b2"])
    assert measurement.mask.tolist() == [True, False, True]
    assert measurement.present_rows() == [0, 2]
    assert measurement.y()[1] == 0.0
    assert np.isnan(measurement.mean_db[1])
    assert set(measurement.to_dict()["beams"]) == {"b0", "b2"}


def test_unknown_beam_is_rejected():
    with pytest.raises(DimensionError):
        ingest_measurements(_csv("g1,c1,b9,-60,"), beam_labels=["b0", "b1"])


def test_bad_value_reports_line_number():
    with pytest.raises(MeasurementFormatError) as excinfo:
        ingest_measurements(_csv("g1,c1,b0,-60,", "g1,c1,b1,-61,", "g1,c1,b0,strong,"))
    assert excinfo.value.line_number == 4


def test_empty_identifier_reports_line_number():
    with pytest.raises(MeasurementFormatError) as excinfo:
        ingest_measurements(_csv("g1,,b0,-60,"))
    assert excinfo.value.line_number == 2


def test_missing_header_column():
    with pytest.raises(MeasurementFormatError) as excinfo:
        ingest_measurements(b"grid_id,beam_id,rsrp_db\ng1,b0,-60\n")
    assert excinfo.value.line_number == 1


@pytest.mark.parametrize("content", [b"", HEADER.encode()])
def test_empty_input_is_rejected(content):
    with pytest.raises(MeasurementFormatError):
        ingest_measurements(content)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        MeasurementIngestor(tmp_path / "absent.csv").load_data()


def test_rows_become_measurement_records():
    ingestor = MeasurementIngestor(_csv("g1,c1,b0,-60.5,2024-05-01T10:00:00", "g1,c1,b1,-61,"))
    records = ingestor.parse_records()
    assert records == [
        MeasurementRecord("g1", "c1", "b0", -60.5, "2024-05-01T10:00:00"),
        MeasurementRecord("g1", "c1", "b1", -61.0, None),
    ]


def test_non_finite_rsrp_reports_line_number():
    with pytest.raises(MeasurementFormatError) as excinfo:
        ingest_measurements(_csv("g1,c1,b0,-60,", "g1,c1,b0,nan,"))
    assert excinfo.value.line_number == 3
    with pytest.raises(ValueError):
        MeasurementRecord("g1", "c1", "", -60.0)
