import numpy as np
import pytest

from dipoleswitch.cli import main, parse_args


def test_parse_sweep_invocation_matches_flags():
    invocation = parse_args(
        [
            "sweep", "--geometry", "chain", "--extents", "9",
            "--x-min", "0", "--x-max", "2", "--x-step", "0.001",
            "--kt", "1e-4", "--pairs", "1:2", "--out", "fig1.csv",
        ]
    )
    config = invocation.sweep_config
    assert invocation.subcommand == "sweep"
    assert config.geometry.kind == "chain"
    assert config.geometry.n == 9
    assert config.x_grid().shape[0] == 2001
    assert config.temperatures == (1e-4,)
    assert config.pairs == ((0, 1),)  # 1-based on the surface, 0-based inside
    assert invocation.out == "fig1.csv"


def test_parse_field_dir_iso_and_vector():
    iso = parse_args(["spectrum", "--geometry", "cubic", "--extents", "2,2,2",
                      "--field-dir", "iso", "--x", "0.5"])
    assert iso.geometry.field_direction is None
    vec = parse_args(["spectrum", "--geometry", "chain", "--extents", "3",
                      "--field-dir", "1,0,0", "--x", "0.5"])
    assert np.array_equal(vec.geometry.field_direction, [1.0, 0.0, 0.0])


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--geometry", "chain", "--extents", "9", "--x-min", "0",
         "--x-max", "2", "--x-step", "-1", "--kt", "1e-4", "--out", "x.csv"],
        ["sweep", "--geometry", "chain", "--extents", "9", "--x-min", "0",
         "--x-max", "2", "--x-step", "0.1", "--kt", "1e-4", "--out", "x.csv",
         "--pairs", "0:1"],
        ["sweep", "--geometry", "chain", "--extents", "nine", "--x-min", "0",
         "--x-max", "2", "--x-step", "0.1", "--kt", "1e-4", "--out", "x.csv"],
        ["sweep", "--geometry", "ring", "--extents", "9", "--x-min", "0",
         "--x-max", "2", "--x-step", "0.1", "--kt", "1e-4", "--out", "x.csv"],
        ["spectrum", "--geometry", "chain", "--extents", "64", "--x", "0.5"],
        ["spectrum", "--geometry", "chain", "--extents", "3", "--x", "0.5",
         "--unknown-flag"],
        ["point", "--geometry", "chain", "--extents", "2", "--x", "0.5",
         "--kt", "-1", "--pairs", "1:2"],
        ["feasibility", "--dipole", "-3", "--field", "1e5", "--spacing", "1e-8"],
        [],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2
    capsys.readouterr()


def test_spectrum_prints_four_eigenvalues(capsys):
    code = main(["spectrum", "--geometry", "chain", "--extents", "2", "--x", "0.5"])
    out = capsys.readouterr().out
    assert code == 0
    values = [float(line) for line in out.strip().splitlines()]
    assert values == pytest.approx([-0.5, 0.0, 1.0, 1.5], abs=1e-12)


def test_point_reports_full_concurrence_below_crossing(capsys):
    code = main(["point", "--geometry", "chain", "--extents", "2",
                 "--x", "0.5", "--kt", "1e-4", "--pairs", "1:2"])
    out = capsys.readouterr().out
    assert code == 0
    label, value = out.split()
    assert label == "1:2"
    assert float(value) == pytest.approx(1.0, abs=1e-6)


def test_point_all_pairs(capsys):
    code = main(["point", "--geometry", "chain", "--extents", "3",
                 "--x", "0.5", "--kt", "1e-4"])
    out = capsys.readouterr().out
    assert code == 0
    assert [line.split()[0] for line in out.strip().splitlines()] == [
        "1:2", "1:3", "2:3",
    ]


def test_feasibility_reproduces_laboratory_scales(capsys):
    code = main(["feasibility", "--dipole", "3", "--field", "1e5",
                 "--spacing", "10e-9"])
    out = capsys.readouterr().out
    assert code == 0
    table = dict(line.split(" = ") for line in out.strip().splitlines())
    assert float(table["coupling_energy_K"]) == pytest.approx(0.0652, abs=0.002)
    assert float(table["omega_over_Omega"]) == pytest.approx(1.112, abs=0.01)


def test_sweep_writes_csv_and_transitions(tmp_path, capsys):
    out = tmp_path / "n2.csv"
    code = main(["sweep", "--geometry", "chain", "--extents", "2",
                 "--x-min", "0.5", "--x-max", "1.5", "--x-step", "0.1",
                 "--kt", "1e-4", "--pairs", "1:2", "--out", str(out), "-v"])
    captured = capsys.readouterr()
    assert code == 0
    lines = out.read_bytes().decode().strip().splitlines()
    assert lines[0] == "x,kT,i,j,concurrence"
    assert len(lines) == 1 + 11
    assert lines[1].startswith("0.5,0.0001,1,2,")
    transitions = (tmp_path / "n2.transitions.csv").read_bytes().decode()
    assert transitions.splitlines()[0] == "x_star,kT,kind"
    assert any("crossing" in line for line in transitions.splitlines()[1:])
    # progress goes to stderr, data stays out of stdout
    assert captured.out == ""
    assert "sweep:" in captured.err


def test_sweep_identical_invocations_byte_identical(tmp_path):
    argv = ["sweep", "--geometry", "chain", "--extents", "3",
            "--x-min", "0.2", "--x-max", "1.2", "--x-step", "0.2",
            "--kt", "1e-3", "--pairs", "all", "--out", ""]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    argv_a = argv[:-1] + [str(first)]
    argv_b = argv[:-1] + [str(second)]
    assert main(argv_a) == 0
    assert main(argv_b) == 0
    assert first.read_bytes() == second.read_bytes()


def test_magic_angle_reference_is_a_computation_error(capsys):
    # field at arccos(1/sqrt(3)) to the chain axis zeroes the reference coupling
    fx = 1.0 / 3.0**0.5
    fz = (2.0 / 3.0) ** 0.5
    code = main(["spectrum", "--geometry", "chain", "--extents", "3",
                 "--field-dir", f"{fx},0,{fz}", "--x", "0.5"])
    captured = capsys.readouterr()
    assert code == 1
    assert "magic angle" in captured.err
    assert captured.out == ""


def test_sweep_unwritable_out_exits_one_without_partial_file(tmp_path, capsys):
    missing = tmp_path / "nope" / "out.csv"
    code = main(["sweep", "--geometry", "chain", "--extents", "2",
                 "--x-min", "0.5", "--x-max", "1.5", "--x-step", "0.5",
                 "--kt", "1e-4", "--out", str(missing)])
    captured = capsys.readouterr()
    assert code == 1
    assert "error:" in captured.err
    assert not missing.exists()


def test_point_at_zero_temperature_uses_exact_ground_state(capsys):
    code = main(["point", "--geometry", "chain", "--extents", "2",
                 "--x", "0.5", "--kt", "0", "--pairs", "1:2"])
    out = capsys.readouterr().out
    assert code == 0
    assert float(out.split()[1]) == pytest.approx(1.0, abs=1e-12)


def test_workers_flag_reaches_sweep_config():
    invocation = parse_args(
        ["sweep", "--geometry", "chain", "--extents", "3", "--x-min", "0",
         "--x-max", "1", "--x-step", "0.5", "--kt", "1e-4", "--out", "x.csv",
         "--workers", "3", "--no-detect", "--fidelity-threshold", "0.4"]
    )
    assert invocation.sweep_config.workers == 3
    assert invocation.sweep_config.transition_detection is False
    assert invocation.sweep_config.fidelity_threshold == 0.4


def test_help_exits_zero():
    assert main(["--help"]) == 0


def test_console_entry_point_installed():
    import shutil

    exe = shutil.which("dipoleswitch")
    if exe is None:
        pytest.skip("entry point not on PATH")
    import subprocess

    proc = subprocess.run(
        [exe, "spectrum", "--geometry", "chain", "--extents", "2", "--x", "1.5"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.strip().splitlines()) == 4
