use std::fs;
use std::path::Path;
use std::sync::Arc;

use satake_density::density::sieve;
use satake_density::shell::emit::{write_assignment_csv, write_assignment_json, REPORT_SCHEMA};
use satake_density::shell::{
    arrange, ingest, run_experiment, ExperimentConfig, IngestedData, InputFormat,
};
use satake_density::sim::{build_assignment, SamplerSpec};

fn demo_config() -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/satotate_g1.toml");
    ExperimentConfig::load(&path).unwrap()
}

fn small_config(extra: &str) -> ExperimentConfig {
    ExperimentConfig::parse(&format!(
        r#"
genus = 2
prime_bound = 20000
mode = "signed"
c_values = [0.5, 1.0, 100.0]
seed = 11
{extra}
[sampler]
kind = "uniform_torus"
"#
    ))
    .unwrap()
}

#[test]
fn assignment_round_trips_through_csv_and_json() {
    let table = Arc::new(sieve(5000).unwrap());
    for g in 1..=3 {
        let a = build_assignment(&SamplerSpec::uniform(g, 5), Arc::clone(&table)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("a.csv");
        let json = dir.path().join("a.json");
        write_assignment_csv(&csv, &a).unwrap();
        write_assignment_json(&json, &a).unwrap();
        for (path, format) in [(csv, InputFormat::Csv), (json, InputFormat::Json)] {
            let records = ingest(&path, format).unwrap();
            let IngestedData::Satake(back) = arrange(records, None).unwrap() else {
                panic!("angles expected");
            };
            assert_eq!(back.table().primes(), a.table().primes());
            for (x, y) in back.tuples().iter().zip(a.tuples()) {
                for (u, v) in x.angles().iter().zip(y.angles()) {
                    assert!((u - v).abs() <= 1e-12);
                    assert_eq!(u.to_bits(), v.to_bits());
                }
            }
        }
    }
}

#[test]
fn demo_config_has_positive_margins() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&demo_config(), dir.path()).unwrap();
    assert_eq!(report.bounds.len(), 4);
    for b in &report.bounds {
        assert!(b.margin > 0.0, "c={} margin={}", b.c, b.margin);
    }
}

#[test]
fn report_validates_against_schema() {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft202012)
        .compile(&schema)
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&small_config(""), dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    if let Err(errors) = compiled.validate(&report) {
        let msgs: Vec<String> = errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect();
        panic!("schema violations: {msgs:?}");
    }

    let mut broken = report.clone();
    broken.as_object_mut().unwrap().remove("versions");
    assert!(!compiled.is_valid(&broken));
}

#[test]
fn empty_exceptional_set_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&small_config(""), dir.path()).unwrap();
    assert_eq!(report.bounds[2].diagnostics.members, 0);
    let text = fs::read_to_string(dir.path().join("exceptional_2.csv")).unwrap();
    assert_eq!(text, "p,mu\n");
    let first = fs::read_to_string(dir.path().join("exceptional_0.csv")).unwrap();
    assert!(first.lines().count() > 1);
}

#[test]
fn csv_outputs_parse_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&small_config(""), dir.path()).unwrap();
    let mut r = csv::Reader::from_path(dir.path().join("dirichlet.csv")).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        vec!["s", "c_0.5", "c_1", "c_100"]
    );
    for (k, row) in r.records().enumerate() {
        let row = row.unwrap();
        for (j, b) in report.bounds.iter().enumerate() {
            let v: f64 = row[j + 1].parse().unwrap();
            assert_eq!(v.to_bits(), b.estimates.dirichlet_ratios[k].to_bits());
        }
    }
    let primes = fs::read_to_string(dir.path().join("primes.csv")).unwrap();
    assert!(primes.starts_with("p,mu,member_0.5,member_1,member_100\n2,"));
    assert!(!primes.contains('\r'));
}

#[test]
fn single_prime_run_is_well_formed() {
    let cfg = ExperimentConfig::parse(
        r#"
genus = 1
prime_bound = 2
mode = "abs"
c_values = [1.0]
[sampler]
kind = "sato_tate_g1"
"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&cfg, dir.path()).unwrap();
    assert_eq!(report.config.x_grid, vec![2]);
    let est = &report.bounds[0].estimates;
    assert!(est.dirichlet_ratios.iter().all(|r| *r == 0.0 || *r == 1.0));
    let rows = fs::read_to_string(dir.path().join("assignment.csv")).unwrap();
    assert_eq!(rows.lines().count(), 2);
}

#[test]
fn same_config_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&small_config(""), a.path()).unwrap();
    rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| run_experiment(&small_config(""), b.path()).unwrap());
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 9);
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert!(x == y, "{name:?} differs");
    }
}

#[test]
fn bare_mu_input_runs_without_log_l() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("mu.csv");
    let table = sieve(1000).unwrap();
    let mut text = String::from("p,mu\n");
    for (i, p) in table.primes().iter().enumerate() {
        text.push_str(&format!("{p},{}\n", if i % 3 == 0 { 2.5 } else { -0.5 }));
    }
    fs::write(&data, text).unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(
        &cfg_path,
        "genus = 2\nmode = \"abs\"\nc_values = [2.0]\n[input]\npath = \"mu.csv\"\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    let report = run_experiment(&cfg, &dir.path().join("out")).unwrap();
    assert!(report.log_l.is_empty());
    assert_eq!(report.config.prime_bound, Some(997));
    let diag = &report.bounds[0].diagnostics;
    assert!(diag.divergence.is_none());
    assert_eq!(diag.members, table.len().div_ceil(3));
}
