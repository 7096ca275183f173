fn main() {
    std::process::exit(crosscurv_cli::run());
}
