fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(gue_minors_cli::parse_and_run(&argv));
}
