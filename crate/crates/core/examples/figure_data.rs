//! Writes every figure dataset as CSV into a directory, through the same
//! code path as the command-line tool.
//!
//!     cargo run --release --example figure_data -- out/

use std::path::PathBuf;

use usd_attack::cli::run;

const FIGURES: &[(&str, &[&str])] = &[
    ("pd_sweep.csv", &["pd", "--sweep"]),
    (
        "region_mu2.csv",
        &["region", "--mu", "2", "--eta-b", "0.5", "--eta-l", "0.1"],
    ),
    (
        "necessary.csv",
        &[
            "map",
            "--necessary",
            "--from",
            "0.01",
            "--to",
            "1000",
            "--steps",
            "200",
            "--log",
        ],
    ),
    ("fscan.csv", &["fscan", "--eta-l", "0.1", "--eta-b", "0.5"]),
    (
        "small_etab.csv",
        &[
            "map",
            "--small-etab",
            "--from",
            "0.05",
            "--to",
            "4.08",
            "--steps",
            "200",
        ],
    ),
    ("beamsplit.csv", &["beamsplit", "--eta", "0.05"]),
];

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir).expect("create output directory");
    for (file, args) in FIGURES {
        let path = dir.join(file);
        let argv = ["usd-attack"]
            .into_iter()
            .chain(args.iter().copied())
            .chain(["-o", path.to_str().expect("utf-8 path")]);
        let code = run(argv, &mut std::io::stdout(), &mut std::io::stderr());
        assert_eq!(code, 0, "{file}");
        println!("wrote {}", path.display());
    }
}
