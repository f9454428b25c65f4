"""End-to-end tests for the msched subcommands"""
import pytest

from msched.main import main


def run(capsys, *argv):
    code = main([str(arg) for arg in argv])
    captured = capsys.readouterr()
    return code, captured.out.splitlines(), captured.err


@pytest.fixture
def sfa_lb_file(tmp_path, capsys):
    path = tmp_path / "sfa_lb.txt"
    code, _, _ = run(capsys, "gen", "--scenario", "sfa-lb", "--k", 8, "--t", 3, "-o", path)
    assert code == 0
    return path


# ==================== gen ====================

def test_gen_to_stdout(capsys):
    code, out, _ = run(capsys, "gen", "--scenario", "sfa-lb", "--k", 8, "--t", 2, "--seed", 4)
    assert code == 0
    assert out[:3] == ["# K=8 mode=p2 size=unit", "# seed=4", "# scenario=sfa-lb"]
    assert out[3:] == ["1,1,1"] * 4 + ["1,1,8", "2,1,8"]


def test_gen_missing_parameter(capsys):
    code, _, err = run(capsys, "gen", "--scenario", "greedy-lb", "--k", 8, "--l1", 2)
    assert code == 2
    assert "requires --l2" in err


def test_gen_invalid_parameter(capsys):
    code, _, err = run(capsys, "gen", "--scenario", "sfa-gap", "--k", 8, "--t", 4)
    assert code == 2
    assert "must be odd" in err


def test_gen_stochastic_file(capsys, tmp_path):
    path = tmp_path / "stoch.txt"
    code, out, _ = run(capsys, "gen", "--scenario", "stochastic", "--k", 16, "--arr", 2,
                       "--horizon", 10, "--seed", 1, "-o", path)
    assert code == 0
    assert out == ["# seed=1", "jobs=20"]
    assert path.read_text().startswith("# K=16 mode=p2 size=unit\n# seed=1\n")


# ==================== sim / opt / ratio ====================

def test_sim_with_all_monitors(capsys, sfa_lb_file, tmp_path):
    schedule = tmp_path / "schedule.txt"
    code, out, _ = run(capsys, "sim", "-i", sfa_lb_file, "--policy", "ra", "--monitors", "all",
                       "--dump-schedule", schedule)
    assert code == 0
    assert out[0] == "# seed=0"
    assert out[1].startswith("policy=ra K=8 banks=1 jobs=7 flow=19 ")
    assert out[2:] == ["relaxed,true,", "full_bound,true,", "volume_drift,true,", "work,true,", "packing,true,"]
    assert schedule.read_text().splitlines()[0] == "1: 4"


def test_sim_monitor_violation_exits_one(capsys, tmp_path):
    path = tmp_path / "relaxed.txt"
    path.write_text("# K=8 mode=p2 size=unit\n" + "1,1,2\n" * 3 + "1,1,8\n" * 6)
    code, out, err = run(capsys, "sim", "-i", path, "--policy", "greedy", "--monitors", "relaxed")
    assert code == 1
    assert out[-1] == "relaxed,false,1"


def test_sim_errors(capsys, sfa_lb_file, tmp_path):
    code, _, err = run(capsys, "sim", "-i", sfa_lb_file, "--policy", "ra", "--monitors", "bogus")
    assert code == 2 and "bogus" in err

    general = tmp_path / "general.txt"
    general.write_text("# K=6 mode=gen size=unit\n1,1,3\n")
    code, _, err = run(capsys, "sim", "-i", general, "--policy", "ra")
    assert code == 2 and "power-of-two" in err

    with pytest.raises(SystemExit):
        main(["sim", "-i", str(sfa_lb_file), "--policy", "fifo"])


def test_opt(capsys, sfa_lb_file):
    code, out, _ = run(capsys, "opt", "-i", sfa_lb_file)
    assert code == 0
    assert out[1] == "opt_flow=10"
    assert out[3] == "1: 0,1,2,3"


def test_ratio(capsys, sfa_lb_file):
    code, out, _ = run(capsys, "ratio", "-i", sfa_lb_file, "--policy", "sfa")
    assert code == 0
    assert out[1:] == ["ratio = 19/10", "bound = 9"]


@pytest.fixture
def pair_file(tmp_path):
    path = tmp_path / "pair.txt"
    path.write_text("# K=4 mode=p2 size=unit\n1,1,4\n1,1,4\n")
    return path


def test_opt_with_larger_k(capsys, pair_file):
    code, out, _ = run(capsys, "opt", "-i", pair_file)
    assert code == 0 and out[1] == "opt_flow=3"

    code, out, _ = run(capsys, "opt", "-i", pair_file, "--k", 8)
    assert code == 0
    assert out[1] == "opt_flow=2"
    assert out[3] == "1: 0,1"


def test_sim_with_larger_k_and_oracle_monitors(capsys, pair_file):
    code, out, _ = run(capsys, "sim", "-i", pair_file, "--policy", "ra", "--k", 8, "--monitors", "all")
    assert code == 0
    assert out[1].startswith("policy=ra K=8 banks=1 jobs=2 flow=2 ")
    assert all(line.split(",")[1] == "true" for line in out[2:])


def test_binary_input_is_invalid(capsys, tmp_path):
    path = tmp_path / "binary.txt"
    path.write_bytes(b"\xff\xfe\x00")
    code, _, err = run(capsys, "sim", "-i", path, "--policy", "ra")
    assert code == 2
    assert "not UTF-8" in err


def test_policy_help_lists_descriptions(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["sim", "--help"])
    assert exc_info.value.code == 0
    assert "exact-fit window sets" in capsys.readouterr().out


def test_opt_too_large(capsys, tmp_path):
    path = tmp_path / "big.txt"
    path.write_text("# K=16 mode=p2 size=unit\n" + "1,1,1\n" * 20)
    code, _, err = run(capsys, "opt", "-i", path)
    assert code == 2
    assert "exceeds the limit" in err


# ==================== check ====================

def test_check_trace_and_schedule(capsys, sfa_lb_file, tmp_path):
    schedule = tmp_path / "schedule.txt"
    run(capsys, "sim", "-i", sfa_lb_file, "--policy", "sfa", "--dump-schedule", schedule)
    code, out, _ = run(capsys, "check", "-i", sfa_lb_file, "--schedule", schedule)
    assert code == 0
    assert out == ["trace valid=true jobs=7", "schedule feasible=true flow=19"]


def test_check_rejects_bad_schedule(capsys, sfa_lb_file, tmp_path):
    schedule = tmp_path / "bad.txt"
    schedule.write_text("1: 0,1,2,3,4\n")
    code, out, _ = run(capsys, "check", "-i", sfa_lb_file, "--schedule", schedule)
    assert code == 1
    assert out[-1].startswith("schedule feasible=false slot=1")


def test_check_reports_trace_violations(capsys, tmp_path):
    path = tmp_path / "odd.txt"
    path.write_text("# K=8 mode=p2 size=unit\n1,1,3\n")
    code, out, _ = run(capsys, "check", "-i", path)
    assert code == 1
    assert out[0] == "trace valid=false jobs=1"
    assert "need_not_power_of_two" in out[1]


# ==================== exp ====================

def test_exp_small_grid(capsys):
    code, out, _ = run(capsys, "exp", "--scenario", "rate-k16", "--k", 8, "--trials", 2, "--horizon", 10)
    assert code == 0
    assert out[0] == "# seed=0"
    assert out[1] == "scenario,K,param,policy,trials,mean_per_job_flow"
    assert len(out) == 2 + 4 * 2


def test_exp_reference_columns_are_opt_in(capsys):
    args = ("exp", "--scenario", "rate-k16", "--trials", 1, "--horizon", 4)
    code, out, _ = run(capsys, *args)
    assert code == 0
    assert out[1] == "scenario,K,param,policy,trials,mean_per_job_flow"

    code, out, _ = run(capsys, *args, "--references")
    assert code == 0
    assert out[1] == "scenario,K,param,policy,trials,mean_per_job_flow,reference_value"
    assert out[2].startswith("rate-k16,16,5,ra,1,")
    assert out[2].endswith(",23.9000")


def test_exp_rand_lb_theta(capsys, tmp_path):
    path = tmp_path / "theta.csv"
    code, out, _ = run(capsys, "exp", "--scenario", "rand-lb-theta", "--k", 4, "--trials", 1, "-o", path)
    assert code == 0
    assert out[-1] == "rows=2"
    assert path.read_text().splitlines()[0].endswith(",reference_value,flow_ratio")


def test_exp_rejects_bad_k(capsys):
    code, _, err = run(capsys, "exp", "--scenario", "rate-k16", "--k", 6, "--trials", 1)
    assert code == 2
    assert "power of two" in err
