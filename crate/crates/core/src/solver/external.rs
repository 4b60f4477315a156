use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{Model, SatStatus, SolverError, SolverVerdict};
use crate::encoder::{serialize_smtlib, Query};
use crate::ir::{mask, Sort, Value};
use crate::sexp::{parse_all, Sexp, SexpKind};

/// Environment variable naming the external solver command.
pub const SOLVER_ENV: &str = "KINDMC_SOLVER";

/// Runs one query through an external SMT-LIB2 solver.
///
/// The whole script goes to the solver's standard input at once. A solver
/// that answers `unsat` or `unknown` will usually complain about the
/// trailing `get-value` and may exit nonzero; only after `sat` is the exit
/// status required to be zero.
pub fn run_external(q: &Query, command: &[String], timeout_ms: u64) -> Result<SolverVerdict, SolverError> {
    let (program, args) = command
        .split_first()
        .ok_or_else(|| SolverError::Config("external solver command is empty".into()))?;
    let spawn_err = |e: std::io::Error| SolverError::Spawn {
        command: command.join(" "),
        reason: e.to_string(),
    };
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(spawn_err)?;

    let script = serialize_smtlib(q);
    let mut stdin = child.stdin.take().expect("piped stdin");
    let writer = thread::spawn(move || {
        // A solver that exits early closes the pipe; its output tells why.
        let _ = stdin.write_all(script.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut out = String::new();
        stdout.read_to_string(&mut out).map(|_| out)
    });

    let deadline = (timeout_ms > 0).then(|| Instant::now() + Duration::from_millis(timeout_ms));
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {}
            Err(e) => return Err(SolverError::Protocol(format!("waiting for solver: {e}"))),
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(SolverVerdict::unknown(format!("timeout after {timeout_ms} ms")));
        }
        thread::sleep(Duration::from_millis(2));
    };
    let _ = writer.join();
    let output = reader
        .join()
        .expect("reader thread")
        .map_err(|e| SolverError::Protocol(format!("reading solver output: {e}")))?;

    let verdict = parse_response(q, &output)?;
    if verdict.status == SatStatus::Sat && !status.success() {
        return Err(SolverError::Protocol(format!("solver exited with {status} after sat")));
    }
    Ok(verdict)
}

fn protocol(msg: impl Into<String>) -> SolverError {
    SolverError::Protocol(msg.into())
}

/// Interprets solver output for `q`: a status line, then on `sat` one
/// `get-value` response binding every declared name.
pub(crate) fn parse_response(q: &Query, output: &str) -> Result<SolverVerdict, SolverError> {
    let items = parse_all(output).map_err(|e| protocol(format!("unparseable output: {e}")))?;
    let mut items = items.iter();
    let first = items.next().ok_or_else(|| protocol("no response"))?;
    match first.atom() {
        Some("unsat") => return Ok(SolverVerdict::unsat()),
        Some("unknown") => return Ok(SolverVerdict::unknown("solver answered unknown")),
        Some("sat") => {}
        _ => return Err(protocol(format!("expected sat/unsat/unknown, got {first}"))),
    }

    let mut sorts: Vec<(String, Sort)> = q.decls.iter().map(|d| (d.name(), d.sort)).collect();
    sorts.extend(q.markers.iter().map(|m| (m.name.clone(), Sort::Bool)));
    let mut model = Model::new();
    if !sorts.is_empty() {
        let values = items.next().ok_or_else(|| protocol("missing get-value response"))?;
        let pairs = values
            .list()
            .ok_or_else(|| protocol(format!("expected a value list, got {values}")))?;
        for pair in pairs {
            let (name, value) = match pair.list() {
                Some([n, v]) => (n, v),
                _ => return Err(protocol(format!("malformed binding {pair}"))),
            };
            let name = name.atom().ok_or_else(|| protocol(format!("malformed name {name}")))?;
            let sort = sorts
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, s)| *s)
                .ok_or_else(|| protocol(format!("value for undeclared name {name}")))?;
            model.insert(name.to_string(), parse_value(value, sort)?);
        }
    }
    // Keep declaration order so models from both backends compare equal.
    let mut ordered = Model::new();
    for (name, _) in &sorts {
        let v = model
            .get(name)
            .copied()
            .ok_or_else(|| protocol(format!("no value for {name}")))?;
        ordered.insert(name.clone(), v);
    }
    Ok(SolverVerdict {
        status: SatStatus::Sat,
        model: Some(ordered),
        diagnostic: None,
    })
}

fn parse_value(s: &Sexp, sort: Sort) -> Result<Value, SolverError> {
    let bad = || protocol(format!("cannot read {s} as {sort}"));
    let v = match (&s.kind, sort) {
        (SexpKind::Atom(a), Sort::Bool) => match a.as_str() {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => return Err(bad()),
        },
        (SexpKind::Atom(a), Sort::BitVec(w)) => {
            let (digits, radix, width) = if let Some(d) = a.strip_prefix("#b") {
                (d, 2, d.len())
            } else if let Some(d) = a.strip_prefix("#x") {
                (d, 16, d.len() * 4)
            } else {
                return Err(bad());
            };
            if width != w as usize {
                return Err(bad());
            }
            Value::bv(w, u64::from_str_radix(digits, radix).map_err(|_| bad())?)
        }
        (SexpKind::List(items), Sort::BitVec(w)) => match items.as_slice() {
            [u, lit, width] if u.atom() == Some("_") => {
                let lit = lit.atom().and_then(|l| l.strip_prefix("bv")).ok_or_else(bad)?;
                let width: u8 = width.atom().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
                if width != w {
                    return Err(bad());
                }
                let bits: u64 = lit.parse().map_err(|_| bad())?;
                if bits > mask(w) {
                    return Err(bad());
                }
                Value::bv(w, bits)
            }
            _ => return Err(bad()),
        },
        _ => return Err(bad()),
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::encode_base_case;
    use crate::frontend::{generate_benchmark, BenchmarkSpec};

    fn b1() -> Query {
        encode_base_case(&generate_benchmark(&BenchmarkSpec::chain_bug(5)).unwrap(), 1)
    }

    #[test]
    fn reads_status_and_values() {
        let q = b1();
        assert_eq!(
            parse_response(&q, "unsat\n(error \"model is not available\")\n")
                .unwrap()
                .status,
            SatStatus::Unsat
        );
        assert_eq!(parse_response(&q, "unknown\n").unwrap().status, SatStatus::Unknown);
        let v = parse_response(&q, "sat\n((viol%1 false) (x@1 (_ bv5 3)))").unwrap();
        let m = v.model.unwrap();
        assert_eq!(m.keys().collect::<Vec<_>>(), ["x@1", "viol%1"]);
        assert_eq!(m["x@1"], Value::bv(3, 5));
        assert_eq!(m["viol%1"], Value::Bool(false));
        let hex = parse_response(&q, "sat ((x@1 #b101) (viol%1 true))").unwrap();
        assert_eq!(hex.model.unwrap()["x@1"], Value::bv(3, 5));
    }

    #[test]
    fn rejects_malformed_output() {
        let q = b1();
        for bad in [
            "",
            "maybe",
            "sat",
            "sat ((x@1 #b101))",
            "sat ((x@1 #x5) (viol%1 true))",
            "sat ((x@1 #b101) (viol%1 1))",
            "sat ((y@1 #b101) (viol%1 true))",
            "(error \"boom\")",
        ] {
            assert!(
                matches!(parse_response(&q, bad), Err(SolverError::Protocol(_))),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn missing_binary_is_a_spawn_error() {
        let cmd = vec!["/nonexistent/solver-binary".to_string()];
        assert!(matches!(run_external(&b1(), &cmd, 0), Err(SolverError::Spawn { .. })));
    }

    #[test]
    fn slow_solver_times_out_as_unknown() {
        let cmd = vec!["sleep".to_string(), "5".to_string()];
        let v = run_external(&b1(), &cmd, 50).unwrap();
        assert_eq!(v.status, SatStatus::Unknown);
        assert!(v.diagnostic.unwrap().contains("timeout"));
    }

    #[test]
    fn canned_solver_output_is_used() {
        let cmd = [
            "sh",
            "-c",
            "cat >/dev/null; echo sat; echo '((x@1 #b101) (viol%1 true))'",
        ];
        let cmd: Vec<String> = cmd.iter().map(|s| s.to_string()).collect();
        let v = run_external(&b1(), &cmd, 0).unwrap();
        assert_eq!(v.status, SatStatus::Sat);
        let failing = [
            "sh",
            "-c",
            "cat >/dev/null; echo sat; echo '((x@1 #b101) (viol%1 true))'; exit 2",
        ];
        let failing: Vec<String> = failing.iter().map(|s| s.to_string()).collect();
        assert!(matches!(
            run_external(&b1(), &failing, 0),
            Err(SolverError::Protocol(_))
        ));
    }
}
