//! Drive the command line front end in-process: build a graph, measure it, run the fast suite.

use hyperreg::cli::run_captured;

fn main() {
    let dir = std::env::temp_dir().join("hyperreg-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let g = dir.join("hp5.3g").display().to_string();
    for args in [
        vec!["construct", "--family", "HP", "--k", "5", "--out", g.as_str()],
        vec!["measure", "--metric", "vdisc3", "--in", g.as_str(), "--json"],
        vec!["suite", "--tier", "fast"],
    ] {
        let out = run_captured(std::iter::once("hyperreg").chain(args.iter().copied()));
        println!("$ hyperreg {}\n{}(exit {})", args.join(" "), out.stdout, out.code);
    }
}
