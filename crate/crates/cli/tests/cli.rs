// Copyright 2026 The libound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::process::{Command, Output};

fn libound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_libound")).args(args).env_remove("RUST_BACKTRACE").output().unwrap()
}

fn stdout_lines(out: &Output) -> Vec<String> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(str::to_string).collect()
}

fn field(lines: &[String], row: usize, name: &str) -> String {
    let col = lines[0].split(',').position(|c| c == name).unwrap();
    lines[row].split(',').nth(col).unwrap().to_string()
}

fn num(lines: &[String], row: usize, name: &str) -> f64 {
    field(lines, row, name).parse().unwrap()
}

#[test]
fn stats_line() {
    let lines =
        stdout_lines(&libound(&["stats", "--dist", "uniform:0,1", "--n", "1000", "--seed", "3", "--mu", "matched"]));
    assert_eq!(lines[0], "n,seed,sup_norm,l1_norm,cvm,dkw_bound,cvm_threshold");
    assert_eq!(lines.len(), 2);
    assert!((num(&lines, 1, "dkw_bound") - (std::f64::consts::PI / 2000.0).sqrt()).abs() < 1e-15);
    assert!((num(&lines, 1, "cvm_threshold") - 1.0 / 6000.0).abs() < 1e-18);
    assert!(num(&lines, 1, "l1_norm") <= num(&lines, 1, "sup_norm"));
}

#[test]
fn approx_methods() {
    let lines = stdout_lines(&libound(&["approx", "--dist", "uniform:0,1", "--k", "16", "--method", "closed"]));
    assert_eq!(lines[0], "class,k,method,grid,error,bound_1_over_4K,adversarial_bound");
    assert_eq!(num(&lines, 1, "error"), 1.0 / 64.0);
    assert!((num(&lines, 1, "adversarial_bound") - 1.0 / 960.0).abs() < 1e-18);

    let lines = stdout_lines(&libound(&[
        "approx", "--dist", "pow:2", "--mu", "lebesgue", "--class", "p1", "--k", "1", "--method", "direct",
    ]));
    assert!((num(&lines, 1, "error") - 1.0 / 16.0).abs() < 1e-6);
    assert_eq!(field(&lines, 1, "adversarial_bound"), "");

    let lines =
        stdout_lines(&libound(&["approx", "--dist", "uniform:0,1", "--k", "4", "--method", "dp", "--grid", "400"]));
    assert!((num(&lines, 1, "error") - 1.0 / 16.0).abs() < 1e-3);

    let out = libound(&["approx", "--dist", "uniform:0,1", "--class", "p1", "--k", "4", "--method", "closed"]);
    assert!(!out.status.success());
}

#[test]
fn query_rows_are_reproducible() {
    let args = [
        "query",
        "--dist",
        "logistic:0.5,0.1,0,1",
        "--n",
        "2000",
        "--k",
        "8",
        "--strategy",
        "exp",
        "--queries",
        "25",
        "--qseed",
        "9",
    ];
    let lines = stdout_lines(&libound(&args));
    assert_eq!(lines[0], "q,rank,epsilon,routing_steps,search_steps");
    assert_eq!(lines.len(), 26);
    for row in 1..lines.len() {
        assert!(num(&lines, row, "search_steps") >= 1.0);
        assert!(num(&lines, row, "rank") <= 2000.0);
    }
    assert_eq!(lines, stdout_lines(&libound(&args)));
}

#[test]
fn bound_rows() {
    let lines = stdout_lines(&libound(&["bound", "--row", "l1", "--n", "100000", "--k", "16"]));
    assert_eq!(lines[0], "row,n,k,r,bound,table_form,vacuity_threshold");
    assert!((num(&lines, 1, "bound") - 1166.17).abs() < 0.01);
    assert!((num(&lines, 1, "vacuity_threshold") - 0.0039633).abs() < 1e-7);

    let lines = stdout_lines(&libound(&[
        "bound", "--row", "e1", "--n", "1048576", "--k", "4", "--r", "0.25", "--cf", "1", "--cff", "1",
    ]));
    assert!((num(&lines, 1, "table_form") - 3.0).abs() < 1e-12);
    assert!(num(&lines, 1, "bound") < num(&lines, 1, "table_form"));

    assert!(!libound(&["bound", "--row", "e1", "--n", "100", "--k", "4"]).status.success());
    assert!(!libound(&["bound", "--row", "l1", "--n", "100", "--k", "4", "--cf", "1"]).status.success());
}

#[test]
fn verify_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.conf");
    let output = dir.path().join("out").join("trials.csv");
    std::fs::write(
        &config,
        format!(
            "n_list = 100\nk_list = 100\nr_override = 0.5\ntrials = 3\nqueries_per_trial = 50\noutput_path = {}\n",
            output.display()
        ),
    )
    .unwrap();
    let config = config.to_str().unwrap();

    let out = libound(&["verify", "--config", config]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("VIOLATED"));
    assert!(dir.path().join("out").join("summary.csv").exists());

    // `experiment` reports the violation but still exits zero.
    assert!(libound(&["experiment", "--config", config]).status.success());

    // Flags override the file: n = K = 10 with the true error is vacuous.
    let out = libound(&["verify", "--config", config, "--n-list", "10", "--k-list", "10", "--r-override", "0.025"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.ends_with("vacuous")), "{text}");

    let summary = std::fs::read_to_string(dir.path().join("out").join("summary.csv")).unwrap();
    assert!(summary.starts_with("schema=1\n"));
    let trials = std::fs::read_to_string(&output).unwrap();
    assert!(trials.starts_with("schema=1\n"));

    assert!(!libound(&["verify", "--config", config, "--trials", "zero"]).status.success());
    assert!(!libound(&["verify", "--config", "/nonexistent/sweep.conf"]).status.success());
}
