use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let report = blindcounter::cli::run(std::env::args_os());
    let text = report.render();
    if report.raw.is_some() && report.exit_code != 0 {
        eprint!("{text}");
    } else {
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(text.as_bytes());
    }
    ExitCode::from(report.exit_code as u8)
}
