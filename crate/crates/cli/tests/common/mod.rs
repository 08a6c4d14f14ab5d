//! Fixture runner shared by the golden tests and the acceptance target.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn fixtures() -> PathBuf {
    tests_dir().join("fixtures")
}

pub fn golden_dir() -> PathBuf {
    tests_dir().join("golden")
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary with the fixture directory as working directory.
pub fn run(args: &[&str]) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_entire-ops"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("spawn entire-ops");
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
    /// Substrings the diagnostic must contain.
    pub stderr_has: &'static [&'static str],
}

pub const CASES: &[Case] = &[
    Case {
        name: "apply_translation_z2",
        args: &["apply", "--operator", "translation_a1.json", "--function", "z2.json", "--p", "1", "--tau", "1"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "apply_dilation_z3",
        args: &["apply", "--operator", "dilation_s1.json", "--function", "z3.json", "--p", "1", "--tau", "1"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "apply_config_defaults",
        args: &["--config", "config_p1.json", "apply", "--operator", "translation_a1.json", "--function", "z2.json"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "apply_with_certificate",
        args: &[
            "apply", "--operator", "translation_a1.json", "--function", "z3.json", "--p", "1", "--tau", "1",
            "--certificate", "../golden/classify_translation_normal.json",
        ],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "apply_missing_dim",
        args: &["apply", "--operator", "translation_a1.json", "--function", "missing_dim.json", "--p", "1", "--tau", "1"],
        code: 2,
        stderr_has: &["dim"],
    },
    Case {
        name: "apply_certificate_too_weak",
        args: &[
            "apply", "--operator", "translation_a1.json", "--function", "z3.json", "--p", "1", "--tau", "1000000",
            "--certificate", "../golden/classify_translation_normal.json",
        ],
        code: 3,
        stderr_has: &["ratio"],
    },
    Case {
        name: "apply_certificate_not_pass",
        args: &[
            "apply", "--operator", "borderline.json", "--function", "z3.json", "--p", "1", "--tau", "1",
            "--certificate", "../golden/classify_borderline.json",
        ],
        code: 3,
        stderr_has: &[],
    },
    Case {
        name: "extract_identity",
        args: &["extract", "--blackbox", "identity_table.json", "--max-order", "4"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "extract_translation2",
        args: &["extract", "--blackbox", "translation2_table.json", "--max-order", "8", "--coeff-trunc", "8"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "extract_incomplete",
        args: &["extract", "--blackbox", "incomplete_table.json", "--max-order", "4"],
        code: 2,
        stderr_has: &["(1,)", "(3,)"],
    },
    Case {
        name: "classify_translation_normal",
        args: &["classify", "--operator", "translation_a1.json", "--p", "1", "--mode", "normal"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "classify_translation_minimal_iii",
        args: &["classify", "--operator", "translation_a1.json", "--p", "2", "--mode", "minimal", "--condition", "III"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "classify_unit_coeffs",
        args: &["classify", "--operator", "unit_coeffs.json", "--p", "1", "--mode", "normal"],
        code: 1,
        stderr_has: &[],
    },
    Case {
        name: "classify_borderline",
        args: &["classify", "--operator", "borderline.json", "--p", "1", "--mode", "normal"],
        code: 4,
        stderr_has: &[],
    },
    Case {
        name: "classify_custom_grids",
        args: &[
            "classify", "--operator", "translation_a1.json", "--p", "1", "--mode", "normal", "--eps-grid", "0.5,0.1",
            "--b-grid", "0.01,1,10",
        ],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "classify_bad_grid",
        args: &["classify", "--operator", "translation_a1.json", "--p", "1", "--mode", "normal", "--b-grid", "1,x"],
        code: 2,
        stderr_has: &["b-grid"],
    },
    Case {
        name: "norm_z2_p2",
        args: &["norm", "--function", "z2.json", "--p", "2", "--tau", "1"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "norm_mixed2d",
        args: &["norm", "--function", "mixed2d.json", "--p", "1", "--tau", "0.5"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "norm_bad_p",
        args: &["norm", "--function", "z2.json", "--p", "-1", "--tau", "1"],
        code: 2,
        stderr_has: &[],
    },
    Case {
        name: "schrodinger_one_plus_z_sq",
        args: &["schrodinger", "--t", "0.5", "--phi", "one_plus_z_sq.json", "--grid", "polar:2:5:5", "--K", "40"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "schrodinger_exp",
        args: &["schrodinger", "--t", "0.1", "--phi", "exp60.json", "--grid", "polar:2:5:5", "--K", "40"],
        code: 0,
        stderr_has: &[],
    },
    Case {
        name: "schrodinger_bad_grid",
        args: &["schrodinger", "--t", "0.1", "--phi", "z2.json", "--grid", "square:2"],
        code: 2,
        stderr_has: &["polar"],
    },
];

/// Compares (or with `UPDATE_GOLDEN` set, rewrites) the golden stdout of
/// each case. Returns one message per mismatch.
pub fn check_cases() -> Vec<String> {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut problems = Vec::new();
    for case in CASES {
        let first = run(case.args);
        let second = run(case.args);
        if first.code != case.code {
            problems.push(format!(
                "{}: exit {} (want {}), stderr: {}",
                case.name, first.code, case.code, first.stderr
            ));
        }
        if first.stdout != second.stdout || first.code != second.code {
            problems.push(format!("{}: output differs between runs", case.name));
        }
        for s in case.stderr_has {
            if !first.stderr.contains(s) {
                problems.push(format!("{}: stderr lacks {s:?}: {}", case.name, first.stderr));
            }
        }
        if case.code == 0 || case.code == 1 || case.code == 4 {
            let path = golden_dir().join(format!("{}.json", case.name));
            if update {
                fs::write(&path, &first.stdout).expect("write golden");
            } else {
                match fs::read_to_string(&path) {
                    Ok(want) if want == first.stdout => {}
                    Ok(_) => problems.push(format!("{}: differs from {}", case.name, path.display())),
                    Err(e) => problems.push(format!("{}: {}: {e}", case.name, path.display())),
                }
            }
        } else if !first.stdout.is_empty() {
            problems.push(format!("{}: error run wrote to stdout", case.name));
        }
    }
    problems
}
