use std::process::ExitCode;

use zeta_dqpt_cli::{parse_config, run, CliError};

fn main() -> ExitCode {
    let result = parse_config(std::env::args_os()).and_then(|config| run(&config).map(|_| ()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code() as u8;
            match &e {
                CliError::Clap(inner) => {
                    let _ = inner.print();
                }
                other => eprintln!("zeta-dqpt: {other}"),
            }
            ExitCode::from(code)
        }
    }
}
