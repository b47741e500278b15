import json

import pytest

from dnls_plot import ArtifactError, open_artifacts

from conftest import make_evolve_artifacts, write_manifest


def test_missing_directory(tmp_path):
    with pytest.raises(ArtifactError, match="not a directory"):
        open_artifacts(tmp_path / "nowhere")


def test_missing_manifest(tmp_path):
    d = tmp_path / "run"
    d.mkdir()
    (d / "timeseries.csv").write_text("time,mass\n0.0,1.0\n")
    with pytest.raises(ArtifactError, match="no manifest.json"):
        open_artifacts(d)


def test_incomplete_manifest_refused(tmp_path):
    d = make_evolve_artifacts(tmp_path / "run", complete=False)
    with pytest.raises(ArtifactError, match="incomplete"):
        open_artifacts(d)


def test_malformed_manifest(tmp_path):
    d = tmp_path / "run"
    d.mkdir()
    (d / "manifest.json").write_text("[1, 2]\n")
    with pytest.raises(ArtifactError, match="complete/files"):
        open_artifacts(d)
    (d / "manifest.json").write_text("{not json")
    with pytest.raises(ArtifactError, match="not valid JSON"):
        open_artifacts(d)


def test_file_not_in_manifest(evolve_dir):
    (evolve_dir / "extra.csv").write_text("a,b\n1,2\n")
    art = open_artifacts(evolve_dir)
    with pytest.raises(ArtifactError, match="not listed in the manifest"):
        art.read_csv("extra.csv", ("a",))


def test_listed_file_missing(evolve_dir):
    (evolve_dir / "timeseries.csv").unlink()
    art = open_artifacts(evolve_dir)
    with pytest.raises(ArtifactError, match="missing from"):
        art.read_csv("timeseries.csv", ("time",))


def test_hash_mismatch(evolve_dir):
    # any edit after the run finished invalidates the directory
    f = evolve_dir / "timeseries.csv"
    f.write_text(f.read_text().replace("5.0", "5.1", 1))
    art = open_artifacts(evolve_dir)
    with pytest.raises(ArtifactError, match="manifest hash"):
        art.read_csv("timeseries.csv", ("time",))


def test_missing_columns_are_named(tmp_path):
    d = make_evolve_artifacts(tmp_path / "run", drop_column="momentum_2")
    art = open_artifacts(d)
    with pytest.raises(ArtifactError) as err:
        art.read_csv("timeseries.csv", ("time", "mass", "momentum_2"))
    assert "momentum_2" in str(err.value)
    assert "missing required column" in str(err.value)


def test_multiple_missing_columns_all_named(tmp_path):
    d = tmp_path / "run"
    d.mkdir()
    (d / "virial.csv").write_text("time,v\n0.0,1.0\n1.0,2.0\n")
    write_manifest(d, command="Virial")
    art = open_artifacts(d)
    with pytest.raises(ArtifactError) as err:
        art.read_csv("virial.csv",
                     ("time", "v", "vp", "vpp_direct", "vpp_fd"))
    msg = str(err.value)
    for name in ("vp", "vpp_direct", "vpp_fd"):
        assert name in msg


def test_read_csv_structured(evolve_dir):
    art = open_artifacts(evolve_dir)
    ts = art.read_csv("timeseries.csv", ("time", "mass", "i_value"))
    assert ts.shape == (12,)
    assert ts["time"][0] == 0.0
    assert ts["mass"][0] == pytest.approx(5.0, rel=1e-9)


def test_single_row_csv_is_one_dimensional(tmp_path):
    d = tmp_path / "run"
    d.mkdir()
    (d / "only.csv").write_text("time,v\n0.0,1.0\n")
    write_manifest(d)
    art = open_artifacts(d)
    data = art.read_csv("only.csv", ("time", "v"))
    assert data.shape == (1,)


def test_read_json_required_keys(evolve_dir):
    art = open_artifacts(evolve_dir)
    summary = art.read_json("summary.json", ("classification", "aborted"))
    assert summary["aborted"] is False
    with pytest.raises(ArtifactError, match="no_such_key"):
        art.read_json("summary.json", ("no_such_key",))


def test_has(evolve_dir):
    art = open_artifacts(evolve_dir)
    assert art.has("timeseries.csv")
    assert not art.has("curve.csv")
