// Run any TOML config file and write its CSV output, as the binary does.
//
// `cargo run --example from_config -- configs/decay_1d.toml out/decay`

use std::path::PathBuf;

use fvstab::cli::{execute, Overrides, Verb};

pub fn run_config(config: PathBuf, out: PathBuf) -> fvstab::Result<()> {
    let ov = Overrides {
        out: Some(out),
        stride: None,
    };
    for line in execute(Verb::Check, &config, &ov)? {
        println!("{line}");
    }
    for line in execute(Verb::Run, &config, &ov)? {
        println!("{line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fvstab::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/decay_1d.toml")));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/from_config"));
    run_config(config, out)
}
