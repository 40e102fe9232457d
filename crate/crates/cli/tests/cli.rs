use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitkit"))
        .args(args)
        .env_remove("SPLITKIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Writes `text` to a fresh file under the target directory.
fn scratch_file(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::File::create(&path).unwrap().write_all(text.as_bytes()).unwrap();
    path
}

#[test]
fn decide_b0_is_unsplittable() {
    let o = run(&["decide", "--p", "1/2", &data("b0.im")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "UNSPLITTABLE\n");
    let o = run(&["decide", &data("b0.vp")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn decide_empty_collection() {
    let o = run(&["decide", "--p", "1/2", &data("empty.im")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "SPLITTABLE\nwitness:\n");
}

#[test]
fn decide_witness_is_a_splitter() {
    // B1 = {1,2,3,4}, B2 = {3,4,5}, p = 1/4: targets 1 and 1 (0.75 rounds up)
    let path = scratch_file("two.im", "2 5\n1 1 1 1 0\n0 0 1 1 1\n");
    let o = run(&["decide", "--p", "1/4", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().nth(1).unwrap();
    let chosen: Vec<usize> = line
        .strip_prefix("witness:")
        .unwrap()
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    let hits = |set: &[usize]| chosen.iter().filter(|e| set.contains(e)).count();
    assert_eq!(hits(&[1, 2, 3, 4]), 1);
    assert_eq!(hits(&[3, 4, 5]), 1);
}

#[test]
fn decide_dmono_falls_back_to_search() {
    let o = run(&["decide", "--dmono", &data("b0.vp")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("monofold-bound-unmet"));
    let o = run(&["decide", "--dmono", "--p", "1/3", &data("b0.vp")]);
    assert_eq!(o.status.code(), Some(2));
    let big = scratch_file("mono.vp", "2\n10 12\n01 12\n11 3\n");
    let o = run(&["decide", "--dmono", "--disc-constant", "1", big.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("criterion: monofold-bound"));
}

#[test]
fn format_errors_exit_2() {
    let bad = scratch_file("bad.im", "2 2\n1 0\n");
    assert_eq!(run(&["decide", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["decide", "/nonexistent.im"]).status.code(), Some(2));
    assert_eq!(run(&["decide", "--p", "0.5", &data("b0.im")]).status.code(), Some(2));
    assert_eq!(run(&["decide", "--p", "3/2", &data("b0.im")]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn disc_of_b0() {
    let o = run(&["disc", &data("b0.im")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("discrepancy: 2\n"));
}

#[test]
fn classify3_reports_criterion() {
    let o = run(&["classify3", &data("b0.vp")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "UNSPLITTABLE\ncriterion: odd-sum-empty-center\n");
    let one = scratch_file("mono3.vp", "3\n100 1\n110 1\n101 1\n011 1\n");
    let o = run(&["classify3", one.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("SPLITTABLE\ncriterion: "));
    assert!(text.contains("witness:"));
}

#[test]
fn classify4_reports_type() {
    let b0_plus = scratch_file("type0.vp", "4\n1100 1\n1010 1\n0110 1\n");
    let o = run(&["classify4", b0_plus.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "UNSPLITTABLE\ntype: 0\n");
    let type1 = scratch_file("type1.vp", "4\n1110 1\n0111 1\n1011 1\n1101 1\n1111 1\n");
    let o = run(&["classify4", type1.to_str().unwrap()]);
    assert_eq!(stdout(&o), "UNSPLITTABLE\ntype: 1\n");
    let easy = scratch_file("easy.vp", "4\n1111 2\n");
    let o = run(&["classify4", easy.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("SPLITTABLE\ntype: none\n"));
    assert_eq!(run(&["classify4", &data("b0.vp")]).status.code(), Some(2));
}

#[test]
fn zoe_reduce_without_rhs() {
    let o = run(&["zoe-reduce", "--p", "1/3", &data("a.im")]);
    let golden = std::fs::read_to_string(data("a_p1-3.golden")).unwrap();
    let stripped: String = golden
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                format!("{l}\n")
            } else {
                format!("{}\n", l.rsplit_once(' ').unwrap().0)
            }
        })
        .collect();
    assert_eq!(stdout(&o), stripped);
}

#[test]
fn zoe_reduce_above_half_complements_targets() {
    let low = stdout(&run(&["zoe-reduce", "--p", "1/3", "--rhs", &data("a.im")]));
    let high = stdout(&run(&["zoe-reduce", "--p", "2/3", "--rhs", &data("a.im")]));
    for (l, h) in low.lines().zip(high.lines()).skip(1) {
        let lt: Vec<u64> = l.split(' ').map(|t| t.parse().unwrap()).collect();
        let ht: Vec<u64> = h.split(' ').map(|t| t.parse().unwrap()).collect();
        let (row, rhs) = lt.split_at(lt.len() - 1);
        assert_eq!(&ht[..row.len()], row);
        assert_eq!(ht[row.len()], row.iter().sum::<u64>() - rhs[0]);
    }
}

#[test]
fn zoe_check_agrees() {
    for p in ["1/2", "1/3", "2/5", "2/3"] {
        let o = run(&["zoe-check", "--p", p, &data("a.im")]);
        assert_eq!(o.status.code(), Some(0), "{p}");
        assert!(stdout(&o).ends_with("agree: true\n"));
    }
    let extra = scratch_file("extra_row.im", "2 2\n1 1\n1 1\n3 3\n");
    assert_eq!(run(&["zoe-check", extra.to_str().unwrap()]).status.code(), Some(2));
    let none = scratch_file("nosol2.im", "3 3\n1 1 0\n0 1 1\n1 0 1\n");
    let o = run(&["zoe-check", none.to_str().unwrap()]);
    assert_eq!(stdout(&o), "zoe: UNSOLVABLE\nreduced: UNSPLITTABLE\nagree: true\n");
}

#[test]
fn sweep4_gate_and_report() {
    assert_eq!(run(&["sweep4", "--max-count", "3"]).status.code(), Some(2));
    let o = run(&["sweep4", "--max-count", "1", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("profiles: 32768\n"));
    assert!(text.ends_with("mismatches: 0\n"));
}

#[test]
fn estimates_are_reproducible() {
    let a = run(&["estimate-f", "--n", "3", "--k", "4", "--samples", "3000", "--seed", "5"]);
    let b = run(&["estimate-f", "--n", "3", "--k", "4", "--samples", "3000", "--jobs", "1", "--seed", "5"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("seed=5\n"));
    let c = Command::new(env!("CARGO_BIN_EXE_splitkit"))
        .args(["estimate-f", "--n", "3", "--k", "4", "--samples", "3000"])
        .env("SPLITKIT_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(stdout(&a), stdout(&c));
}

#[test]
fn exact_f_and_bound() {
    let o = run(&["exact-f", "--n", "3", "--k", "3"]);
    assert!(stdout(&o).starts_with("f=253/256\n"));
    assert_eq!(run(&["exact-f", "--n", "5", "--k", "3"]).status.code(), Some(2));
    let o = run(&["bound", "--n", "2", "--k", "1000"]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    let b: f64 = first.strip_prefix("bound=").unwrap().parse().unwrap();
    assert!((b - 8.0 / (1000.0 - 12.0 * 2f64.sqrt())).abs() < 1e-12);
    assert_eq!(run(&["bound", "--n", "3", "--k", "20"]).status.code(), Some(2));
}
