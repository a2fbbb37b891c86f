//! Reference evaluator for `itso external`: reads one line of coordinates
//! per request from standard input and answers with the value of a
//! benchmark objective. Fault-injection flags make it misbehave on purpose.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;
use std::thread;
use std::time::Duration;

use clap::Parser;

use itso::external::parse_request;
use itso::Benchmark;

#[derive(Parser)]
#[command(name = "itso-evaluator", about = "Line-protocol benchmark evaluator")]
struct Args {
    /// Benchmark objective name.
    objective: String,
    /// Sleep this long before every answer.
    #[arg(long, default_value_t = 0)]
    delay_ms: u64,
    /// Answer `abc` instead of a number on this (1-based) request.
    #[arg(long)]
    garbage_at: Option<usize>,
    /// Exit without answering on this (1-based) request.
    #[arg(long)]
    exit_at: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let objective = match Benchmark::from_name(&args.objective) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for (k, line) in io::stdin().lock().lines().enumerate() {
        let request = k + 1;
        let Ok(line) = line else {
            return ExitCode::from(1);
        };
        if args.exit_at == Some(request) {
            return ExitCode::from(1);
        }
        if args.delay_ms > 0 {
            thread::sleep(Duration::from_millis(args.delay_ms));
        }
        let answer = if args.garbage_at == Some(request) {
            "abc".to_string()
        } else {
            match parse_request(&line) {
                Some(x) if !x.is_empty() => format!("{:?}", objective.evaluate(&x)),
                _ => {
                    eprintln!("error: malformed request {line:?}");
                    return ExitCode::from(1);
                }
            }
        };
        if writeln!(out, "{answer}").and_then(|_| out.flush()).is_err() {
            return ExitCode::from(1);
        }
    }
    ExitCode::SUCCESS
}
