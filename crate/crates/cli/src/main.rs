fn main() {
    std::process::exit(softcircuit_cli::dispatch(std::env::args_os()));
}
