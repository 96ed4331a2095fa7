//! Pilot runs that pin the golden fixtures in `zoo/golden/`.
//!
//! `cargo run --release -p mwl-experiments --example pilot [ZOO_DIR]`

use std::path::PathBuf;

use mwl_experiments::config::Config;
use mwl_experiments::runners::{run, Golden};

const PILOTS: &[(&str, &str, &[&str])] = &[
    ("sl2-pair", "lyapunov", &["lambda", "delta"]),
    ("sl2-pair", "wlln", &["wlln_q1_final"]),
    ("sl2-pair", "clt", &["var_rate"]),
    ("sl2-pair", "aa-bounds", &["aa_q1_c", "aa_q2_c"]),
    ("rhd15", "lyapunov", &["lambda"]),
    ("rhd15", "gclt", &["delta"]),
    ("rhd15", "delta-tail", &["n16_hill_margin"]),
    ("sl3-pair", "higher", &["b_1", "b_2", "b_3"]),
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let zoo: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("zoo"));
    let out = zoo.join("golden");
    std::fs::create_dir_all(&out)?;
    for (law, runner, keys) in PILOTS {
        let mut cfg = Config::load(&zoo.join(format!("{law}.cfg")))?;
        // the pilot itself must not compare against an older fixture
        cfg.stats.golden = None;
        cfg.grid.seed = 0;
        let report = run(runner, &cfg)?;
        let golden = Golden::from_report(&report, keys);
        let path = out.join(format!("{runner}-{}.json", report.steplaw));
        std::fs::write(&path, serde_json::to_string_pretty(&golden)?)?;
        println!(
            "{} {runner} on {law}: {:.1}s",
            path.display(),
            report.wall_time_s
        );
        for c in report.criteria.iter().filter(|c| !c.passed) {
            println!("  FAIL {}: {}", c.name, c.detail);
        }
    }
    Ok(())
}
