fn main() {
    std::process::exit(dlcstc::cli::dispatch(std::env::args_os()));
}
