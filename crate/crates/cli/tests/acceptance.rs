//! Acceptance battery: one PASS/FAIL line per criterion, non-zero exit on
//! any failure. Tolerances and runtime limits are fixed below.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use jetstrata::suite::{run_criterion, CRITERIA};

const SEED: u64 = 42;

/// Wall-clock limit per criterion.
fn limit(id: u8) -> Duration {
    match id {
        2..=4 => Duration::from_secs(300),
        _ => Duration::from_secs(60),
    }
}

fn determinism() -> Result<String, String> {
    let exe = env!("CARGO_BIN_EXE_jetstrata");
    let run = || -> Result<Vec<u8>, String> {
        let out = Command::new(exe)
            .args(["suite", "--seed", &SEED.to_string()])
            .env_remove("JETSTRATA_OUTPUT_DIR")
            .output()
            .map_err(|e| format!("running {exe}: {e}"))?;
        if !out.status.success() {
            return Err(format!(
                "suite exited with {}: {}",
                out.status,
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        Ok(out.stdout)
    };
    let (first, second) = (run()?, run()?);
    if first.is_empty() {
        return Err("suite printed nothing".into());
    }
    if first != second {
        return Err("two runs of `suite --seed 42` differ".into());
    }
    Ok(format!("{} identical bytes", first.len()))
}

fn main() -> ExitCode {
    let mut failed = 0;
    for &(id, name) in &CRITERIA {
        let start = Instant::now();
        let result = if id == 9 {
            determinism()
        } else {
            match run_criterion(id, SEED, 4) {
                Ok(out) if out.passed => Ok(format!("{} cases", out.cases)),
                Ok(out) => Err(out.detail),
                Err(e) => Err(e.to_string()),
            }
        };
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed > limit(id) {
                Err(format!(
                    "took {:.1}s, limit {}s",
                    elapsed.as_secs_f64(),
                    limit(id).as_secs()
                ))
            } else {
                Ok(msg)
            }
        });
        match result {
            Ok(msg) => println!("PASS {id} {name}: {msg} ({:.2}s)", elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id} {name}: {msg} ({:.2}s)", elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
