//! Drives the command-line front end in-process: writes a configuration,
//! runs `curve` into a temporary directory and prints the manifest.
//!
//! ```bash
//! cargo run --release --example run_directory
//! ```

use std::fs;

const CONFIG: &str = r#"
precision_bits = 192

[mu]
a = "-1"
b = "0"

[sigma]
a = "0"
b = "3"

[curve]
c = "1/3"
"#;

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join(format!("frobpade-example-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let cfg = dir.join("touching.toml");
    fs::write(&cfg, CONFIG)?;
    let out = dir.join("runs");
    let code = frobpade::cli::run(["frobpade", "curve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    println!("exit code {code}");
    for entry in fs::read_dir(&out)? {
        let run = entry?.path();
        println!("{}", run.display());
        println!("{}", fs::read_to_string(run.join("manifest.json"))?);
    }
    fs::remove_dir_all(&dir)
}
