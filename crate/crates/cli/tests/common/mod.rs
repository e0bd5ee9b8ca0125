#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn lad() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lad"));
    c.env_remove("LAD_OUT_DIR").env_remove("LAD_UI_DIR");
    c
}

pub fn run(args: &[&str]) -> Output {
    lad().args(args).output().expect("lad runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub struct Fixture {
    pub csv: PathBuf,
    pub map: PathBuf,
    pub thresholds: PathBuf,
}

/// Map with features `a..` coded `A..` and class column `class` coded `s`.
pub fn map_json(features: usize) -> String {
    let cols: Vec<String> = (0..features)
        .map(|i| {
            let c = (b'a' + i as u8) as char;
            format!(r#"{{"column": "{c}", "code": "{}"}}"#, c.to_ascii_uppercase())
        })
        .collect();
    format!(
        r#"{{"id_column": "record_id", "features": [{}], "class": {{"column": "class", "code": "s"}}}}"#,
        cols.join(", ")
    )
}

pub fn thresholds_json(features: usize, cut: f64) -> String {
    let cuts: Vec<String> = (0..features)
        .map(|i| format!(r#""{}": {cut}"#, (b'a' + i as u8) as char))
        .collect();
    format!(
        r#"{{"format": "lad-thresholds", "version": 1, "cuts": {{{}}}}}"#,
        cuts.join(", ")
    )
}

pub fn write_table(dir: &Path, name: &str, features: usize, rows: &[(String, Vec<f64>, bool)]) -> Fixture {
    let mut csv = String::from("record_id");
    for i in 0..features {
        write!(csv, ",{}", (b'a' + i as u8) as char).unwrap();
    }
    csv.push_str(",class\n");
    for (id, values, class) in rows {
        csv.push_str(id);
        for v in values {
            write!(csv, ",{v}").unwrap();
        }
        writeln!(csv, ",{}", u8::from(*class)).unwrap();
    }
    let f = Fixture {
        csv: dir.join(format!("{name}.csv")),
        map: dir.join(format!("{name}.map.json")),
        thresholds: dir.join(format!("{name}.thresholds.json")),
    };
    std::fs::write(&f.csv, csv).unwrap();
    std::fs::write(&f.map, map_json(features)).unwrap();
    std::fs::write(&f.thresholds, thresholds_json(features, 0.5)).unwrap();
    f
}

/// 200 records, class = A and not B, features C and D are noise; every one
/// of the 16 feature combinations occurs. Values are 0/1 plus a fixed
/// jitter below 0.4, so the cut 0.5 recovers the combination.
pub fn planted_rows(off_rule: bool) -> Vec<(String, Vec<f64>, bool)> {
    let mut rows: Vec<(String, Vec<f64>, bool)> = (0..200)
        .map(|i: usize| {
            let combo = i % 16;
            let values = (0..4)
                .map(|j| ((combo >> j) & 1) as f64 + ((i * 7 + j * 13) % 40) as f64 / 100.0)
                .collect();
            (format!("r{i}"), values, combo & 1 == 1 && combo & 2 == 0)
        })
        .collect();
    if off_rule {
        rows.push(("x1".into(), vec![1.2, 1.1, 1.0, 0.1], true));
    }
    rows
}

pub fn planted(dir: &Path, off_rule: bool) -> Fixture {
    let name = if off_rule { "offrule" } else { "planted" };
    write_table(dir, name, 4, &planted_rows(off_rule))
}
