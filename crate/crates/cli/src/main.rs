use std::process::ExitCode;

use clap::Parser;
use geomtomo_cli::output::render;
use geomtomo_cli::{run, Cli, CliError};

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("GEOMTOMO_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("GEOMTOMO_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads().and_then(|()| {
        let doc = run(&cli, chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))?;
        let text = render(&doc, cli.format);
        match &cli.output {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(doc)
    });
    match result {
        Ok(doc) => {
            let s = doc.summary;
            if s.pass + s.fail + s.diagnostic > 0 {
                eprintln!("pass {} fail {} diagnostic {}", s.pass, s.fail, s.diagnostic);
            }
            ExitCode::from(doc.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
