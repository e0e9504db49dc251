mod config;
mod modes;

use clap::Parser;
use serde_json::json;

use config::{Cli, RunConfig};

/// Exit codes: 0 success, 2 invalid configuration, 3 solution blow-up,
/// 1 any other failure.
fn main() {
    let cli = Cli::parse();
    let config = match RunConfig::resolve(cli) {
        Ok(c) => c,
        Err(err) => {
            eprintln!("configuration error: {err:#}");
            std::process::exit(2);
        }
    };

    let start = std::time::Instant::now();
    match modes::run(&config) {
        Ok(summary) => {
            let manifest = json!({
                "config": config,
                "version": env!("CARGO_PKG_VERSION"),
                "wall_time_s": start.elapsed().as_secs_f64(),
                "summary": summary,
            });
            let path = config.out_dir.join("manifest.json");
            if let Err(err) = std::fs::write(
                &path,
                serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
            ) {
                eprintln!("cannot write {}: {err}", path.display());
                std::process::exit(1);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
        }
        Err(err) => {
            if let Some(hskdv::Error::BlowUp { t, detail }) = err.downcast_ref::<hskdv::Error>() {
                eprintln!("blow-up at t = {t}: {detail}");
                std::process::exit(3);
            }
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}
