//! Runs named acceptance checks under a time budget and prints one
//! `PASS`/`FAIL` line per check.

use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub name: &'static str,
    pub passed: bool,
    pub elapsed: Duration,
    pub budget: Duration,
    pub detail: String,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({:.2}s of {:.0}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs_f64(),
            self.detail
        )
    }
}

/// A check returns a short summary on success and the reason on failure.
pub type Outcome = Result<String, String>;

/// Runs `check`, catching panics, and fails it when it overruns `budget`.
pub fn run(name: &'static str, budget: Duration, check: impl FnOnce() -> Outcome) -> Line {
    let start = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(check));
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(p) => (false, format!("panicked: {}", panic_message(&*p))),
    };
    if passed && elapsed > budget {
        passed = false;
        detail = format!("over time budget; {detail}");
    }
    Line {
        name,
        passed,
        elapsed,
        budget,
        detail,
    }
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic".to_owned()
    }
}

/// Failed lines whose names are not in `known`.
pub fn unexpected<'a>(lines: &'a [Line], known: &[&str]) -> Vec<&'a Line> {
    lines.iter().filter(|l| !l.passed && !known.contains(&l.name)).collect()
}

/// `Err` with `msg` unless `cond` holds.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_report_outcomes() {
        let long = Duration::from_secs(60);
        let ok = run("ok", long, || Ok("3 cases".into()));
        assert!(ok.passed);
        assert!(ok.to_string().starts_with("PASS ok ("));
        assert!(ok.to_string().ends_with("3 cases"));

        let bad = run("bad", long, || Err("mismatch".into()));
        assert!(!bad.passed && bad.to_string().starts_with("FAIL bad"));

        let boom = run("boom", long, || panic!("kaput"));
        assert!(!boom.passed && boom.detail.contains("kaput"));

        let slow = run("slow", Duration::ZERO, || {
            std::thread::sleep(Duration::from_millis(2));
            Ok(String::new())
        });
        assert!(!slow.passed && slow.detail.contains("budget"));

        let lines = [ok, bad, boom];
        let names: Vec<_> = unexpected(&lines, &["bad"]).iter().map(|l| l.name).collect();
        assert_eq!(names, ["boom"]);
        assert!(ensure(true, || unreachable!()).is_ok());
        assert_eq!(ensure(false, || "no".into()), Err("no".to_string()));
    }
}
