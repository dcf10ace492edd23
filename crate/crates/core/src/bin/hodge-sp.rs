use std::process::ExitCode;

use hodge_sp::cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = match cli::parse_args(std::env::args_os()) {
        Ok(config) => cli::run(&config),
        Err(e) => {
            if e.code == 0 {
                print!("{}", e.message);
            } else {
                eprint!("{}", e.message);
            }
            e.code
        }
    };
    ExitCode::from(code as u8)
}
