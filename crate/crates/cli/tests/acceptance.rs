//! Front-end acceptance: the full reference-configuration sweep at ten
//! nodes (criterion 8), the run/classify round trip, the region-agreement
//! contract, and end-to-end binary behavior including exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use netform_cli::{
    apply_config, cmd_classify, cmd_regions, cmd_run, cmd_sweep, parse_config, resolve,
    RawSettings, Settings,
};

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("netform_{}_{tag}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn resolve_with(f: impl FnOnce(&mut RawSettings)) -> Settings {
    let mut raw = RawSettings::default();
    f(&mut raw);
    resolve(&raw).unwrap()
}

fn column(header: &str, name: &str) -> usize {
    header.split(',').position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"))
}

/// The reference configuration at ten nodes: 20x20 grid, three densities,
/// 100 repetitions per cell, eight workers. Two runs with the same master
/// seed must produce byte-identical data, inside the time budget. The two
/// published endpoint cells are spot-checked in the output.
#[test]
fn criterion_8_full_sweep_reproducibility() {
    let t0 = Instant::now();
    let out_a = temp_dir("sweep_a");
    let out_b = temp_dir("sweep_b");
    let base = |out: &PathBuf| {
        resolve_with(|raw| {
            raw.n = Some("10".into());
            raw.seed = Some("20260814".into());
            raw.workers = Some("8".into());
            raw.out = Some(out.display().to_string());
        })
    };
    let first = cmd_sweep(&base(&out_a)).unwrap();
    let second = cmd_sweep(&base(&out_b)).unwrap();
    assert_eq!(first.rows, 20 * 20 * 3);
    assert_eq!(second.rows, first.rows);

    let bytes_a = fs::read(&first.csv_path).unwrap();
    let bytes_b = fs::read(&second.csv_path).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b, "same seed must give byte-identical sweeps");

    let text = String::from_utf8(bytes_a).unwrap();
    assert!(!text.contains('\r'), "line endings must be LF only");
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let modal_col = column(&header, "modal_class");
    let acts_col = column(&header, "mean_acts");
    let freq_complete_col = column(&header, "freq_COMPLETE");
    let mut checked = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if line.starts_with("0.5,0.1,0,") {
            assert_eq!(fields[modal_col], "COMPLETE");
            assert_eq!(fields[freq_complete_col], "100");
            checked += 1;
        }
        if line.starts_with("0.1,0.5,0,") {
            assert_eq!(fields[acts_col], "0");
            checked += 1;
        }
    }
    assert_eq!(checked, 2, "both endpoint cells must appear exactly once");

    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1800.0, "took {dt:?}");
    println!(
        "acceptance criterion 8: PASS — 1200-cell reference sweep twice, byte-identical, endpoint cells correct ({dt:?})"
    );
    let _ = fs::remove_dir_all(&out_a);
    let _ = fs::remove_dir_all(&out_b);
}

/// Worker count must not leak into the output bytes.
#[test]
fn sweeps_are_identical_across_worker_counts() {
    let out_a = temp_dir("workers_a");
    let out_b = temp_dir("workers_b");
    let base = |out: &PathBuf, workers: Option<&str>| {
        resolve_with(|raw| {
            raw.n = Some("5".into());
            raw.step = Some("1/4".into());
            raw.reps = Some("10".into());
            raw.seed = Some("3".into());
            raw.workers = workers.map(String::from);
            raw.out = Some(out.display().to_string());
        })
    };
    cmd_sweep(&base(&out_a, Some("2"))).unwrap();
    cmd_sweep(&base(&out_b, None)).unwrap();
    assert_eq!(
        fs::read(out_a.join("sweep.csv")).unwrap(),
        fs::read(out_b.join("sweep.csv")).unwrap()
    );
    let _ = fs::remove_dir_all(&out_a);
    let _ = fs::remove_dir_all(&out_b);
}

/// Every graph written by `run` classifies identically when read back.
#[test]
fn run_then_classify_round_trips() {
    for (idx, (delta, cost, n, density, indifferent)) in [
        ("0.5", "0.1", "10", "0", false),
        ("0.5", "0.5", "20", "0", true),
        ("0.3", "0.35", "12", "0.35", false),
        ("0.1", "0.5", "10", "0.7", false),
    ]
    .into_iter()
    .enumerate()
    {
        let out = temp_dir(&format!("roundtrip_{idx}"));
        let s = resolve_with(|raw| {
            raw.n = Some(n.into());
            raw.delta = Some(delta.into());
            raw.cost = Some(cost.into());
            raw.density = Some(density.into());
            raw.allow_indifferent_adds = Some(indifferent);
            raw.seed = Some("11".into());
            raw.out = Some(out.display().to_string());
        });
        let outcome = cmd_run(&s).unwrap();
        let reread = cmd_classify(&out.join("final_graph.txt")).unwrap();
        assert_eq!(reread.primary, outcome.classification.primary);
        assert_eq!(reread.all_matches, outcome.classification.all_matches);

        let trajectory = fs::read_to_string(out.join("trajectory.csv")).unwrap();
        assert!(trajectory.starts_with("iteration,clustering,utility\n"));
        assert_eq!(trajectory.lines().count(), outcome.iterations_used + 2);
        let _ = fs::remove_dir_all(&out);
    }
}

/// Region-agreement contract on a coarse grid: predicted cells that are
/// observed must be marked as matches, analytic predictions follow the
/// closed forms, and cells the dynamics reach but the table does not name
/// are recorded without being counted as matches.
#[test]
fn region_grids_respect_the_agreement_contract() {
    let out = temp_dir("regions");
    let s = resolve_with(|raw| {
        raw.n = Some("10".into());
        raw.step = Some("1/4".into());
        raw.reps = Some("25".into());
        raw.seed = Some("5".into());
        raw.out = Some(out.display().to_string());
    });
    let files = cmd_regions(&s).unwrap();
    assert_eq!(files.len(), 6);

    let read_rows = |slug: &str| -> Vec<(String, String, u8, u8, u8)> {
        let text = fs::read_to_string(out.join(format!("regions_n10_{slug}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("delta,cost,observed,predicted,match"));
        lines
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (
                    f[0].to_string(),
                    f[1].to_string(),
                    f[2].parse().unwrap(),
                    f[3].parse().unwrap(),
                    f[4].parse().unwrap(),
                )
            })
            .collect()
    };

    for slug in [
        "complete",
        "null",
        "cycle",
        "bipartite_complete",
        "equi_tri_partite_complete",
        "equi_k_partite_complete",
    ] {
        let rows = read_rows(slug);
        assert_eq!(rows.len(), 16);
        for (delta, cost, observed, predicted, matched) in &rows {
            assert_eq!(
                *matched,
                (observed == predicted) as u8,
                "{slug} at {delta},{cost}"
            );
            if *predicted == 1 && *observed == 1 {
                assert_eq!(*matched, 1);
            }
        }
    }

    // Ten nodes cannot split into three equal classes; the file must say
    // the structure is never predicted.
    assert!(read_rows("equi_tri_partite_complete").iter().all(|r| r.3 == 0));

    // The closed-form predictions at spot cells: complete wherever the
    // benefit exceeds the cost, null in the opposite corner, and the
    // bipartite band |delta - cost| <= delta^2.
    let find = |rows: &[(String, String, u8, u8, u8)], d: &str, c: &str| -> (u8, u8, u8) {
        rows.iter()
            .find(|r| r.0 == d && r.1 == c)
            .map(|r| (r.2, r.3, r.4))
            .unwrap()
    };
    let complete = read_rows("complete");
    assert_eq!(find(&complete, "0.5", "0.25"), (1, 1, 1), "cheap links build the clique");
    let null = read_rows("null");
    assert_eq!(find(&null, "0.25", "0.5"), (1, 1, 1), "costly links freeze the empty graph");
    let bipartite = read_rows("bipartite_complete");
    for (delta, cost, observed, predicted, matched) in &bipartite {
        let d = netform::payoff::parse_rational(delta).unwrap();
        let c = netform::payoff::parse_rational(cost).unwrap();
        let gap = if d > c { d - c } else { c - d };
        assert_eq!(*predicted == 1, gap <= d * d, "bipartite prediction at {delta},{cost}");
        if *predicted == 1 && *observed == 1 {
            assert_eq!(*matched, 1);
        }
    }
    let _ = fs::remove_dir_all(&out);
}

fn netform_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_netform"))
}

/// End-to-end binary behavior: subcommands succeed, flags beat config
/// entries, and the documented exit codes come back.
#[test]
fn binary_subcommands_and_exit_codes() {
    let out = temp_dir("binary");
    fs::create_dir_all(&out).unwrap();

    let sweep_out = out.join("sweep");
    let status = netform_bin()
        .args([
            "sweep",
            "--n",
            "4",
            "--step",
            "1/2",
            "--reps",
            "5",
            "--densities",
            "0",
            "--out",
        ])
        .arg(&sweep_out)
        .status()
        .unwrap();
    assert!(status.success());
    let sweep = fs::read_to_string(sweep_out.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 4, "2x2 grid, one density");

    let config = out.join("settings.conf");
    fs::write(&config, "n=4\nstep=1/4\nseed=77\n").unwrap();
    let pos_out = out.join("pos");
    let output = netform_bin()
        .args(["pos", "--config"])
        .arg(&config)
        .args(["--n", "6", "--out"])
        .arg(&pos_out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let manifest = fs::read_to_string(pos_out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("command=pos\nn=6\n"), "flag must override the config file");
    assert!(manifest.contains("step=1/4\n"), "config must fill unset flags");
    assert!(manifest.contains("seed=77\n"));
    assert_eq!(fs::read_to_string(pos_out.join("pos.csv")).unwrap().lines().count(), 1 + 9);

    let atlas_out = out.join("atlas");
    let status = netform_bin()
        .args(["atlas", "--n", "3", "--step", "1/2", "--delta", "1", "--cost", "1", "--out"])
        .arg(&atlas_out)
        .status()
        .unwrap();
    assert!(status.success());
    let dump = fs::read_to_string(atlas_out.join("cell.txt")).unwrap();
    assert!(dump.contains("pos=EXACT"), "equal benefit and cost keeps the optimum stable");

    // Usage errors exit 1: unknown flag, and an oracle size out of range.
    let status = netform_bin().arg("--bogus").output().unwrap();
    assert_eq!(status.status.code(), Some(1));
    let status = netform_bin().args(["atlas", "--n", "9"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));

    // I/O errors exit 2: a missing classification input, an out directory
    // blocked by a regular file.
    let status = netform_bin().args(["classify", "no_such_file.txt"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));
    let blocker = out.join("blocker");
    fs::write(&blocker, "x").unwrap();
    let status = netform_bin()
        .args(["pos", "--n", "4", "--out"])
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));

    // Help and version exit 0.
    assert!(netform_bin().arg("--help").output().unwrap().status.success());
    assert!(netform_bin().arg("--version").output().unwrap().status.success());

    // A malformed edge-list file is a usage error, not an I/O error.
    let bad = out.join("bad.txt");
    fs::write(&bad, "c 4\n0 1\n").unwrap();
    let status = netform_bin().args(["classify"]).arg(&bad).output().unwrap();
    assert_eq!(status.status.code(), Some(1));

    let _ = fs::remove_dir_all(&out);
}

/// The config file alone drives a complete invocation.
#[test]
fn config_file_supplies_every_setting() {
    let out = temp_dir("config_only");
    fs::create_dir_all(&out).unwrap();
    let config_path = out.join("all.conf");
    fs::write(
        &config_path,
        format!(
            "n=4\ndelta=0.5\ncost=0.1\ndensity=0\nseed=99\nmax-iters=200\nidle-terminate=10\nout={}\n",
            out.join("run").display()
        ),
    )
    .unwrap();
    let file = parse_config(&fs::read_to_string(&config_path).unwrap()).unwrap();
    let s = resolve(&apply_config(RawSettings::default(), &file).unwrap()).unwrap();
    assert_eq!(s.n_list, vec![4]);
    assert_eq!(s.max_iters, 200);
    let outcome = cmd_run(&s).unwrap();
    assert!(outcome.converged);
    assert_eq!(outcome.classification.primary, netform::ClassLabel::Complete);
    let _ = fs::remove_dir_all(&out);
}
