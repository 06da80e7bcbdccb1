fn main() {
    std::process::exit(gcflow::cli::dispatch(std::env::args_os()));
}
