fn main() -> std::process::ExitCode {
    qwcage_cli::main_entry()
}
