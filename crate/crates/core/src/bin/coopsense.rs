fn main() {
    let mut stderr = std::io::stderr();
    std::process::exit(coopsense::cli::run(std::env::args_os(), &mut stderr));
}
