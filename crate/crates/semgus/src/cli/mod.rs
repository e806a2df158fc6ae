//! Command-line front door: parse a problem file, pick a strategy, report
//! the verdict. Exit codes: 0 realizable, 1 unrealizable, 2 unknown,
//! 3 usage or input error.

/// Run the CLI against the process arguments, returning the exit code.
pub fn run() -> i32 {
    eprintln!("not yet wired up");
    3
}
