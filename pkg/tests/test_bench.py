from qubitcp import bench
from qubitcp.cli import main


def test_suite_seeds():
    specs = bench.suite([4, 5], 3, seed_base=10)
    assert [s.seed for s in specs] == [10, 11, 12, 10, 11, 12]
    assert specs[3].name == "q5_l5_linear_s10"


def test_csv_is_deterministic_without_timing():
    specs = [bench.RunSpec(i, "linear", "faithful") for i in bench.suite([4], 3)]
    a = bench.records_to_csv(bench.run_suite(specs), timing=False)
    b = bench.records_to_csv(bench.run_suite(specs), timing=False)
    assert a == b
    lines = a.splitlines()
    assert lines[0] == bench.CSV_VERSION
    assert lines[1] == "instance,q,L,topology,variant,mode,status,objective,depth,nodes"
    assert len(lines) == 5


def test_errors_are_recorded_per_row():
    bad = bench.RunSpec(bench.suite([4], 1, "lattice")[0], "linear", "faithful")
    record = bench.run_one(bad)
    assert record.status.startswith("error:")


def test_cactus_series_is_cumulative():
    specs = [bench.RunSpec(i, "linear", "faithful") for i in bench.suite([4], 4)]
    series = bench.cactus_series(bench.run_suite(specs))
    points = series["linear/faithful"]
    assert [n for _, n in points] == [1, 2, 3, 4]
    assert [t for t, _ in points] == sorted(t for t, _ in points)


def test_depth_table():
    specs = [bench.RunSpec(i, "general", "faithful") for i in bench.suite([4], 3, "lattice")]
    rows = bench.depth_table(bench.run_suite(specs))
    assert len(rows) == 1 and rows[0][:3] == ("lattice2x2", 4, 4) and rows[0][4] == 3


def test_bench_command_writes_files(tmp_path, capsys):
    assert main(["bench", "--sizes", "4", "--count", "2", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "bench.csv").read_text().startswith(bench.CSV_VERSION)
    assert (tmp_path / "cactus.csv").read_text().startswith(bench.CACTUS_VERSION)
    assert "linear" in capsys.readouterr().out
