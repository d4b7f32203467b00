use std::path::{Path, PathBuf};
use std::process::Command;

use polariton::dispersion::CurveMeta;
use tempfile::TempDir;

const BASE: &str = "\
E0 = 2.104 eV
d = 1 D
n = 3.5e11 cm^-3
tau_coh = 10 ns
m = 1
Delta = 0 meV
g = 0.1 meV
T = 300 K
m_eff = 5e-33 g
n2 = 0.3e8 cm^-2
";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn config(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn run(config: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_polariton"))
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Header and data rows of a CSV, comments dropped.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name} in {header:?}"))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn metadata_comments_lead_every_table() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    for cmd in [
        "check-coupling",
        "dispersion",
        "hopfield",
        "masses",
        "thresholds",
    ] {
        let r = run(&cfg, &[cmd]);
        assert_eq!(r.code, 0, "{cmd}: {}", r.stderr);
        let mut lines = r.stdout.lines();
        assert!(lines.next().unwrap().starts_with("# polariton "));
        assert_eq!(lines.next().unwrap(), format!("# command: {cmd}"));
        assert!(lines.next().unwrap().starts_with("# config_sha256: "));
        assert_eq!(lines.next().unwrap(), "# units: cgs");
    }
}

#[test]
fn check_coupling_exit_codes() {
    let fx = Fixture::new();
    let strong = run(&fx.config("s.cfg", BASE), &["check-coupling"]);
    assert_eq!(strong.code, 0);
    let (h, rows) = csv(&strong.stdout);
    assert_eq!(rows[0][col(&h, "regime")], "Strong");
    assert!((num(&rows[0][col(&h, "ratio")]) - 51.66).abs() < 0.05);

    let weak = run(
        &fx.config("w.cfg", &BASE.replace("tau_coh = 10 ns", "tau_coh = 1 fs")),
        &["check-coupling"],
    );
    assert_eq!(weak.code, 2);
    assert!(weak.stdout.contains(",Weak\n"));
}

#[test]
fn config_errors_exit_one_and_name_the_key() {
    let fx = Fixture::new();
    let r = run(
        &fx.config("m.cfg", &BASE.replace("d = 1 D\n", "")),
        &["check-coupling"],
    );
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("`d`"), "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let r = run(
        &fx.config("u.cfg", &format!("{BASE}colour = 3 K\n")),
        &["masses"],
    );
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("colour"));

    let r = run(
        &fx.config("b.cfg", &BASE.replace("2.104 eV", "2.104")),
        &["masses"],
    );
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("E0"));

    let r = run(
        &fx.config("g.cfg", &BASE.replace("n2 = 0.3e8 cm^-2\n", "")),
        &["thresholds"],
    );
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("n2"));

    let r = run(&fx.path("absent.cfg"), &["masses"]);
    assert_eq!(r.code, 1);
}

#[test]
fn usage_errors_exit_one() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    assert_eq!(run(&cfg, &["dispersion", "--samples", "1"]).code, 1);
    assert_eq!(run(&cfg, &["dispersion", "--kmax", "0"]).code, 1);
    assert_eq!(run(&cfg, &["no-such-command"]).code, 1);
    assert_eq!(run(&cfg, &["--format", "xml", "masses"]).code, 1);
    let help = run(&cfg, &["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("dispersion"));
}

#[test]
fn dispersion_rows_and_resonance() {
    let fx = Fixture::new();
    let r = run(
        &fx.config("a.cfg", BASE),
        &["dispersion", "--samples", "101", "--kmax", "0.1"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (h, rows) = csv(&r.stdout);
    assert_eq!(
        h,
        [
            "k_par_over_k_perp",
            "E1_eV",
            "E2_eV",
            "mu_sq",
            "nu_sq",
            "E_ph_paraxial_eV",
            "E_ph_freespace_eV"
        ]
    );
    assert_eq!(rows.len(), 101);
    let first = &rows[0];
    assert_eq!(num(&first[0]), 0.0);
    assert!((num(&first[1]) - num(&first[2]) - 2e-4).abs() < 1e-11);
    assert_eq!(num(&first[3]), 0.5);
    assert_eq!(num(&first[4]), 0.5);
    assert!((num(&rows[100][0]) - 0.1).abs() < 1e-15);

    let meta = CurveMeta::parse_header(&r.stdout).unwrap();
    assert_eq!(meta.samples, 101);
    assert_eq!(meta.g_ev, 1e-4);
    assert_eq!(meta.delta_ev, 0.0);
    assert!(r.stdout.contains("# well: inflection_k_cm1 = "));
}

#[test]
fn dispersion_is_byte_identical_and_writes_files() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    let a = run(&cfg, &["dispersion"]);
    let b = run(&cfg, &["--jobs", "3", "dispersion"]);
    assert_eq!(a.stdout, b.stdout);
    let out = fx.path("curve.csv");
    let f = run(&cfg, &["--out", out.to_str().unwrap(), "dispersion"]);
    assert_eq!(f.code, 0);
    assert!(f.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap(), a.stdout);
}

#[test]
fn vanishing_coupling_reports_no_well() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", &BASE.replace("g = 0.1 meV", "g = 1e-12 meV"));
    let r = run(&cfg, &["dispersion", "--samples", "11"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("# warning: no well"));
    assert_eq!(csv(&r.stdout).1.len(), 11);
}

#[test]
fn hopfield_weights_sum_to_one() {
    let fx = Fixture::new();
    let r = run(&fx.config("a.cfg", BASE), &["hopfield", "--samples", "21"]);
    assert_eq!(r.code, 0);
    let (h, rows) = csv(&r.stdout);
    assert_eq!(h, ["k_par_over_k_perp", "delta_meV", "mu_sq", "nu_sq"]);
    assert_eq!(rows.len(), 21);
    for row in &rows {
        assert!((num(&row[2]) + num(&row[3]) - 1.0).abs() < 1e-11);
    }
    // photon moves up with k_par, so delta becomes negative and mu_sq grows
    assert!(num(&rows[20][1]) < 0.0);
    assert!(num(&rows[20][2]) > 0.99);
}

#[test]
fn thresholds_schema_and_trap_columns() {
    let fx = Fixture::new();
    let r = run(&fx.config("a.cfg", BASE), &["thresholds"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (h, rows) = csv(&r.stdout);
    assert_eq!(
        h.join(","),
        "T_K,m_eff_g,n3_cm3,n2_cm2,lambda_T_cm,r_int_cm,T_d_K,T_KT_K,mu_meV,omega_eff_s1,\
         T_c_K,N2,N0_frac,degenerate,kt_superfluid,overlap"
    );
    let row = &rows[0];
    assert!((num(&row[col(&h, "T_d_K")]) - 300.0).abs() < 6.0);
    for empty in ["n3_cm3", "omega_eff_s1", "T_c_K", "N2", "N0_frac"] {
        assert_eq!(row[col(&h, empty)], "", "{empty}");
    }
    assert_eq!(row[col(&h, "degenerate")], "true");
    assert!(r.stdout.contains("# lambda_T = h/sqrt(2 pi m_eff k_B T)"));
    assert!(r.stdout.contains("# no trap"));

    let trapped = format!("{}omega_eff = 5e10 s^-1\n", BASE.replace("0.3e8", "0.5e8"));
    let r = run(&fx.config("t.cfg", &trapped), &["thresholds"]);
    let (h, rows) = csv(&r.stdout);
    let row = &rows[0];
    let tc = num(&row[col(&h, "T_c_K")]);
    assert!((tc - 307.67).abs() < 0.01);
    assert!(num(&row[col(&h, "N2")]) > 1e6);
    let frac = num(&row[col(&h, "N0_frac")]);
    assert!((frac - (1.0 - (300.0 / tc).powi(2))).abs() < 1e-9);
}

#[test]
fn thresholds_from_volume_density_notes_the_estimate() {
    let fx = Fixture::new();
    let cfg = BASE.replace("n2 = 0.3e8 cm^-2", "n3 = 3.5e11 cm^-3");
    let r = run(&fx.config("a.cfg", &cfg), &["thresholds"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("# n2 estimated as n3 * lambda_T"));
    let (h, rows) = csv(&r.stdout);
    assert!((num(&rows[0][col(&h, "n2_cm2")]) / 6.429e7 - 1.0).abs() < 1e-3);
}

#[test]
fn mass_falls_back_to_the_lower_branch() {
    let fx = Fixture::new();
    let cfg = BASE.replace("m_eff = 5e-33 g\n", "");
    let r = run(&fx.config("a.cfg", &cfg), &["thresholds"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("# m_eff: lower-branch mass"));
    let masses = run(&fx.config("b.cfg", &cfg), &["masses"]);
    let (hm, mrows) = csv(&masses.stdout);
    let (h, rows) = csv(&r.stdout);
    assert_eq!(rows[0][col(&h, "m_eff_g")], mrows[0][col(&hm, "m_lower_g")]);
}

#[test]
fn si_units_rename_columns() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    let cgs = run(&cfg, &["thresholds"]);
    let si = run(&cfg, &["--units", "si", "thresholds"]);
    let (hc, rc) = csv(&cgs.stdout);
    let (hs, rs) = csv(&si.stdout);
    assert!(hs.contains(&"lambda_T_m".to_string()));
    assert!(hs.contains(&"n2_m2".to_string()));
    assert!(hs.contains(&"m_eff_kg".to_string()));
    let ratio = num(&rs[0][col(&hs, "lambda_T_m")]) / num(&rc[0][col(&hc, "lambda_T_cm")]);
    assert!((ratio - 1e-2).abs() < 1e-14);
    assert!(si.stdout.contains("# units: si"));
}

#[test]
fn json_tables_parse_and_keep_order() {
    let fx = Fixture::new();
    let r = run(
        &fx.config("a.cfg", BASE),
        &["--format", "json", "thresholds"],
    );
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let row = v["rows"][0].as_object().unwrap();
    assert_eq!(row.keys().next().unwrap(), "T_K");
    assert_eq!(row.keys().next_back().unwrap(), "overlap");
    assert!(row["T_c_K"].is_null());
    assert_eq!(row["degenerate"], serde_json::Value::Bool(true));
    assert!(v["comments"][0].as_str().unwrap().starts_with("polariton "));

    let from_cfg = run(
        &fx.config("j.cfg", &format!("{BASE}format = json\n")),
        &["masses"],
    );
    assert!(serde_json::from_str::<serde_json::Value>(&from_cfg.stdout).is_ok());
}

#[test]
fn trap_design_json() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    let r = run(
        &cfg,
        &["trap", "--target-tc", "300 K", "--n-particles", "1e6"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let obj = v.as_object().unwrap();
    let keys: Vec<_> = obj.keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "omega_eff_s1",
            "omega_at_s1",
            "n_prime_cm2",
            "n0",
            "r_max_cm",
            "E_char_eV",
            "assumption_note"
        ]
    );
    let w1 = obj["omega_eff_s1"].as_f64().unwrap();
    assert!((w1 / 5.0e10 - 1.0).abs() < 0.01);
    assert_eq!(obj["E_char_eV"].as_f64(), Some(2.104));

    let r2 = run(
        &cfg,
        &["trap", "--target-tc", "300 K", "--n-particles", "2e6"],
    );
    let w2 = serde_json::from_str::<serde_json::Value>(&r2.stdout).unwrap()["omega_eff_s1"]
        .as_f64()
        .unwrap();
    assert!((w2 / w1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);

    let csv_out = run(
        &cfg,
        &[
            "--format",
            "csv",
            "trap",
            "--target-tc",
            "300 K",
            "--n-particles",
            "1e6",
        ],
    );
    assert!(csv_out.stdout.starts_with("# polariton "));
    assert_eq!(csv(&csv_out.stdout).1.len(), 1);
}

#[test]
fn trap_rejects_bad_targets() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    for args in [
        ["trap", "--target-tc", "0 K", "--n-particles", "1e6"],
        ["trap", "--target-tc", "-300 K", "--n-particles", "1e6"],
        ["trap", "--target-tc", "300 K", "--n-particles", "0"],
        ["trap", "--target-tc", "300", "--n-particles", "1e6"],
    ] {
        let r = run(&cfg, &args);
        assert_eq!(r.code, 1, "{args:?}");
        assert!(!r.stderr.is_empty());
    }
    assert_eq!(run(&cfg, &["trap", "--n-particles", "1e6"]).code, 1);
}

#[test]
fn sweep_masses_through_resonance() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    let r = run(
        &cfg,
        &[
            "sweep", "--param", "Delta", "--from", "-5", "--to", "5", "--steps", "11", "--target",
            "masses",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (h, rows) = csv(&r.stdout);
    assert_eq!(h[0], "sweep_Delta_meV");
    assert_eq!(rows.len(), 11);
    let (up, lo) = (col(&h, "m_upper_g"), col(&h, "m_lower_g"));
    let (kt_up, kt_lo) = (col(&h, "T_KT_upper_K"), col(&h, "T_KT_lower_K"));
    let mut prev = f64::NEG_INFINITY;
    for row in &rows {
        let delta = num(&row[0]);
        assert!(delta > prev);
        prev = delta;
        if delta == 0.0 {
            assert_eq!(row[up], row[lo]);
        } else {
            assert_ne!(row[kt_up], row[kt_lo]);
            // the lighter branch switches sides with the sign of Delta
            assert_eq!(num(&row[up]) < num(&row[lo]), delta < 0.0);
        }
    }
}

#[test]
fn sweep_over_length_and_log_scale() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    let r = run(
        &cfg,
        &[
            "sweep",
            "--param",
            "n2",
            "--from",
            "1e7",
            "--to",
            "1e9",
            "--steps",
            "3",
            "--scale",
            "log",
            "--target",
            "thresholds",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (h, rows) = csv(&r.stdout);
    assert_eq!(h[0], "sweep_n2_cm^-2");
    assert!((num(&rows[1][0]) / 1e8 - 1.0).abs() < 1e-10);

    let r = run(
        &cfg,
        &[
            "sweep", "--param", "L_cav", "--from", "0.29 um", "--to", "0.30 um", "--steps", "2",
            "--target", "masses",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(csv(&r.stdout).1.len(), 2);
}

#[test]
fn sweep_errors() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    let sweep = |param: &str, from: &str, to: &str| {
        run(
            &cfg,
            &[
                "sweep", "--param", param, "--from", from, "--to", to, "--steps", "3", "--target",
                "masses",
            ],
        )
    };
    assert_eq!(sweep("units", "1", "2").code, 1);
    assert_eq!(sweep("nonsense", "1", "2").code, 1);
    assert_eq!(sweep("Delta", "1", "1").code, 1);
    // m = 1.5 is not a mode index
    let r = sweep("m", "1", "2");
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("m = 1.5"), "{}", r.stderr);
}

#[test]
fn sweep_exit_code_is_worst_point() {
    let fx = Fixture::new();
    let cfg = fx.config("a.cfg", BASE);
    let r = run(
        &cfg,
        &[
            "sweep",
            "--param",
            "tau_coh",
            "--from",
            "1e-6",
            "--to",
            "10",
            "--steps",
            "2",
            "--scale",
            "log",
            "--target",
            "check-coupling",
        ],
    );
    assert_eq!(r.code, 2, "{}", r.stderr);
    let (h, rows) = csv(&r.stdout);
    assert_eq!(rows[0][col(&h, "regime")], "Weak");
    assert_eq!(rows[1][col(&h, "regime")], "Strong");
}
