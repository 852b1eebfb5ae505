fn main() {
    let code = timedata_core::analysis::cli::run(std::env::args_os());
    std::process::exit(code);
}
