//! Command-line surface for the weight-1 stability pipeline.
//!
//! Subcommands:
//!   run <N> <N.c>        full two-pass computation with certification
//!   table <spec>         t' rows for the conductor-3 quadratic family
//!   rootdisc <N> <f> <p> root discriminant display
//!   basis export|import  weight-2 basis cache management
//!   graph <p> <l>        l-isogeny graph edge list over F_{p^2}
//!
//! Exit codes: 0 = all requested certifications pass, 2 = computed but at
//! least one certification failed or is conditional, 1 = error.

mod cache;
mod commands;

use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        print_usage();
        return ExitCode::from(1);
    }
    let result = match args[0].as_str() {
        "run" => commands::cmd_run(&args[1..]),
        "table" => commands::cmd_table(&args[1..]),
        "rootdisc" => commands::cmd_rootdisc(&args[1..]),
        "basis" => commands::cmd_basis(&args[1..]),
        "graph" => commands::cmd_graph(&args[1..]),
        "help" | "--help" | "-h" => {
            print_usage();
            Ok(0)
        }
        other => Err(format!("unknown subcommand `{other}`")),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn print_usage() {
    eprintln!(
        "usage:
  hsm run <N> <N.c> [--ell L] [--precision P] [--primes p1,p2]
          [--certify-method auto|a|ii|iii|phi2|d] [--out json|tsv]
          [--cache DIR] [-o FILE]
  hsm table <N1,N2,...|A..B> [--out tsv] [--cache DIR] [-o FILE]
  hsm rootdisc <N> <f_chi> <p>
  hsm basis export <N> --precision P [--cache DIR] [-o FILE]
  hsm basis import <FILE> [--cache DIR]
  hsm graph <p> <ell> [--restrict all|ss] [-o FILE]

The cache directory defaults to ./.hsm-cache (override with --cache or
the HSM_CACHE environment variable)."
    );
}
