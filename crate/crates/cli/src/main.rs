use std::process::ExitCode;

fn main() -> ExitCode {
    match cpspectra_cli::run(std::env::args_os()) {
        Ok((code, json)) => {
            println!("{json}");
            ExitCode::from(code as u8)
        }
        Err(e) => e.exit(),
    }
}
