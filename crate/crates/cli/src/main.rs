use std::process::ExitCode;

fn main() -> ExitCode {
    mih_cli::main_entry()
}
