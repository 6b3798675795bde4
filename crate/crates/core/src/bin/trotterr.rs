fn main() {
    std::process::exit(trotterr::cli::main_exit_code());
}
