//! Driving the command-line front end from code.

use dlcstc::cli::{dispatch, execute, Command, RunConfig};

fn main() {
    let mut rc = RunConfig::default();
    rc.command = Some(Command::RankAudit);
    rc.trials = 50;
    println!("{}", rc.to_json());

    let files = execute(&rc).expect("rank audit runs");
    for (path, body) in &files {
        println!("would write {} ({} bytes)", path.display(), body.len());
    }

    let dir = std::env::temp_dir().join("dlcstc_example");
    let out = dir.join("fig2_mmse.csv");
    let code = dispatch([
        "dlcstc", "fig2", "--estimator", "mmse", "--trials", "2000", "--out", out.to_str().unwrap(),
    ]);
    println!("exit code {code}");
    print!("{}", std::fs::read_to_string(&out).unwrap_or_default());
}
