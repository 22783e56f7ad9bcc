fn main() {
    std::process::exit(spikeres_xlab::cli_main(std::env::args_os()));
}
