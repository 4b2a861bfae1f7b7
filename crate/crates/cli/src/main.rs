use std::process::ExitCode;

fn main() -> ExitCode {
    match spcorr::run(std::env::args_os()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(spcorr::CliError::Usage(msg)) if msg.is_empty() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
