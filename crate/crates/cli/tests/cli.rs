use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use byzagg::adversary::{random_instance, AdversarySpec};
use byzagg::agreement::{run_agreement, AgreementAlgo};
use byzagg::geometry::ApproxRatio;
use byzagg::SystemParams;
use byzagg_cli::output::{
    learning_csv, parse_learning_csv, parse_ratios_csv, parse_rounds_csv, ratios_csv, round_rows, rounds_csv,
};

fn byzagg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_byzagg"))
        .args(args)
        .env_remove("BYZAGG_THREADS")
        .output()
        .expect("binary runs")
}

struct Case {
    _tmp: tempfile::TempDir,
    config: PathBuf,
    out: PathBuf,
}

fn case(toml: &str) -> Case {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.toml");
    fs::write(&config, toml).unwrap();
    let out = tmp.path().join("out");
    Case { _tmp: tmp, config, out }
}

fn run(cmd: &str, c: &Case) -> Output {
    byzagg(&[cmd, "--config", c.config.to_str().unwrap(), "--out", c.out.to_str().unwrap(), "--quiet"])
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

const RANDOM_F0: &str = r#"
seed = 1
[system]
n = 7
t = 2
f = 0
d = 2
[agreement]
algo = "hyperbox_geo"
rounds = 40
eps = 1e-6
"#;

#[test]
fn hyperbox_without_faults_converges() {
    let c = case(RANDOM_F0);
    let o = run("agree", &c);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&c.out);
    assert_eq!(s["converged"], true);
    assert!(s["final_diameter"].as_f64().unwrap() < 1e-6);
    assert!(s["metadata"]["timestamp"].is_u64());
}

#[test]
fn oscillation_keeps_diameter() {
    let c = case(
        r#"
[system]
n = 8
t = 2
f = 2
d = 1
[agreement]
algo = "min_diam_geo"
rounds = 10
eps = 1e-3
tie_break = "adversarial"
[instance]
kind = "md_oscillation"
v1 = [0.0]
v2 = [1.0]
"#,
    );
    assert_eq!(run("agree", &c).status.code(), Some(0));
    let s = summary(&c.out);
    assert_eq!(s["converged"], false);
    assert_eq!(s["final_diameter"], s["initial_diameter"]);
    assert_eq!(s["rounds_used"], 10);
}

#[test]
fn missing_key_exits_2_without_files() {
    let c = case("[system]\nn = 7\nt = 2\nd = 2\n[agreement]\nalgo = \"hyperbox_geo\"\n");
    let o = run("agree", &c);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("system") && err.contains("`f`"), "{err}");
    assert!(!c.out.exists());
}

#[test]
fn semantic_errors_are_all_reported() {
    let c = case(
        "[system]\nn = 16\nt = 2\nf = 0\nd = 12\n[eval]\nalgo = \"hyperbox_geo\"\ninstances = 0\n",
    );
    let o = run("eval", &c);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for key in ["eval.instances", "system.n", "system.d"] {
        assert!(err.contains(key), "{key} missing from {err}");
    }
    assert!(!c.out.exists());
}

#[test]
fn unknown_key_is_a_config_error() {
    let c = case(&format!("{RANDOM_F0}speed = 3\n"));
    let o = run("agree", &c);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("speed"));
}

#[test]
fn rounds_csv_round_trips() {
    let c = case(
        r#"
seed = 5
[system]
n = 10
t = 2
f = 2
d = 3
[agreement]
algo = "hyperbox_geo"
rounds = 6
[adversary]
kind = "sign_flip"
"#,
    );
    assert_eq!(run("agree", &c).status.code(), Some(0));
    let text = fs::read_to_string(c.out.join("rounds.csv")).unwrap();
    let parsed = parse_rounds_csv(&text, 3).unwrap();

    let p = SystemParams::new(10, 2, 2, 3).unwrap();
    let adv = AdversarySpec::new(byzagg::adversary::Behavior::SignFlip, 2).unwrap();
    let inst = random_instance(p, adv, 5).unwrap();
    let run = run_agreement(&inst, AgreementAlgo::HyperboxGeo, 6, 0.0).unwrap();
    let expected = round_rows(&inst.honest_inputs, &run);
    assert_eq!(parsed, expected);
    assert_eq!(parsed.len(), 8 * 7);
    assert_eq!(rounds_csv(&parsed, 3), text);
}

#[test]
fn reruns_are_byte_identical() {
    let c = case(
        r#"
seed = 9
[system]
n = 10
t = 3
f = 3
d = 2
[agreement]
algo = "min_diam_geo"
rounds = 5
[adversary]
kind = "selective_omission"
value = "scaled"
scale = -4.0
recipients = "even_indexed"
"#,
    );
    assert_eq!(run("agree", &c).status.code(), Some(0));
    let first = fs::read(c.out.join("rounds.csv")).unwrap();
    let mut s1 = summary(&c.out);
    assert_eq!(run("agree", &c).status.code(), Some(0));
    assert_eq!(fs::read(c.out.join("rounds.csv")).unwrap(), first);
    let mut s2 = summary(&c.out);
    s1.as_object_mut().unwrap().remove("metadata");
    s2.as_object_mut().unwrap().remove("metadata");
    assert_eq!(s1, s2);
}

#[test]
fn seed_flag_overrides_config() {
    let c = case(RANDOM_F0);
    assert_eq!(run("agree", &c).status.code(), Some(0));
    let a = fs::read(c.out.join("rounds.csv")).unwrap();
    let o = byzagg(&[
        "agree",
        "--config",
        c.config.to_str().unwrap(),
        "--out",
        c.out.to_str().unwrap(),
        "--seed",
        "2",
        "--quiet",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(fs::read(c.out.join("rounds.csv")).unwrap(), a);
    assert_eq!(summary(&c.out)["seed"], 2);
}

#[test]
fn repeated_vector_has_zero_ratios() {
    let c = case(
        r#"
[system]
n = 7
t = 2
f = 0
d = 2
[eval]
algo = "hyperbox_geo"
instances = 2
[instance]
kind = "explicit"
honest = [[0.5, -1.0], [0.5, -1.0], [0.5, -1.0], [0.5, -1.0], [0.5, -1.0], [0.5, -1.0], [0.5, -1.0]]
"#,
    );
    assert_eq!(run("eval", &c).status.code(), Some(0));
    let rows = parse_ratios_csv(&fs::read_to_string(c.out.join("ratios.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2 * 4);
    assert!(rows.iter().all(|r| r.ratio == ApproxRatio::Finite(0.0)));
}

#[test]
fn krum_instance_rows_are_unbounded() {
    let c = case(
        r#"
[system]
n = 7
t = 2
f = 2
d = 3
[eval]
algo = "min_diam_geo"
instances = 3
[instance]
kind = "krum_unbounded"
"#,
    );
    let o = run("eval", &c);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(c.out.join("ratios.csv")).unwrap();
    let rows = parse_ratios_csv(&text).unwrap();
    assert_eq!(ratios_csv(&rows), text);
    for r in &rows {
        match r.rule.as_str() {
            "krum" | "multi_krum_3" => assert!(r.ratio.is_unbounded(), "{r:?}"),
            "min_diam_geo" => assert_eq!(r.ratio, ApproxRatio::Finite(0.0)),
            _ => {}
        }
    }
    assert_eq!(summary(&c.out)["rules"]["krum"]["unbounded_rows"], 3);
}

#[test]
fn single_iteration_gives_one_row() {
    let c = case(
        r#"
[learning]
n = 4
f = 1
rules = ["box_geo"]
architecture = "decentralized"
iterations = 1
[data]
source = "blobs"
classes = 3
per_class = 40
"#,
    );
    let o = run("learn", &c);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(c.out.join("learning.csv")).unwrap();
    let rows = parse_learning_csv(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].iteration, 1);
    assert_eq!(learning_csv(&rows), text);
}

#[test]
fn comparison_suite_writes_one_file_per_rule() {
    let c = case(
        r#"
seed = 3
[learning]
n = 4
f = 1
rules = ["mean", "md_geo"]
iterations = 3
baseline = true
[data]
source = "blobs"
classes = 3
per_class = 40
"#,
    );
    assert_eq!(run("learn", &c).status.code(), Some(0));
    for f in ["learning_mean.csv", "learning_mean_baseline.csv", "learning_md_geo.csv", "learning_md_geo_baseline.csv"] {
        let rows = parse_learning_csv(&fs::read_to_string(c.out.join(f)).unwrap()).unwrap();
        assert_eq!(rows.len(), 3, "{f}");
    }
    let s = summary(&c.out);
    assert!(s["rules"]["md_geo"]["baseline_final_accuracy"].is_f64());
}

#[test]
fn csv_dataset_source() {
    let tmp = tempfile::tempdir().unwrap();
    let data = byzagg::learning::generate_blobs(3, 30, 1.0, 0).unwrap();
    let path = tmp.path().join("data.csv");
    byzagg::learning::write_csv_dataset(&path, &data).unwrap();
    let c = case(&format!(
        "[learning]\nn = 4\nf = 0\nrules = [\"mean\"]\niterations = 2\n[data]\nsource = \"csv\"\npath = {:?}\nmax_value = 10.0\n",
        path.to_str().unwrap()
    ));
    let o = run("learn", &c);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn repro_exit_codes() {
    let o = byzagg(&["repro", "md-oscillation"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("md-oscillation: PASS"));
    let o = byzagg(&["repro", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("safearea-unbounded") && err.contains("hyperbox-contraction"), "{err}");
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let c = case(RANDOM_F0);
    let o = Command::new(env!("CARGO_BIN_EXE_byzagg"))
        .args(["agree", "--config", c.config.to_str().unwrap(), "--out", c.out.to_str().unwrap()])
        .env("BYZAGG_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(!c.out.exists());
}

#[test]
fn example_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = byzagg_cli::config::load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let ok = if cfg.learning.is_some() {
            byzagg_cli::config::learn_plan(&cfg).is_ok()
        } else if cfg.eval.is_some() {
            byzagg_cli::config::eval_plan(&cfg).is_ok()
        } else {
            byzagg_cli::config::agree_plan(&cfg).is_ok()
        };
        assert!(ok, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
}
