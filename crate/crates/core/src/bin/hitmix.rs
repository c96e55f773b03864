fn main() {
    std::process::exit(hitmix::cli::run(std::env::args_os()));
}
