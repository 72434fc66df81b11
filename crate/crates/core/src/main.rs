use clap::Parser;

use faber_frame::cli::{execute, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match execute(&cli.command).and_then(|(artifact, out)| {
        artifact.write(out.as_deref())?;
        Ok(artifact.exit_code())
    }) {
        Ok(code) => {
            if code != 0 {
                eprintln!("faber: a bound or identity check failed");
            }
            code
        }
        Err(e) => {
            eprintln!("faber: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
