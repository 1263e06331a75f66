fn main() {
    std::process::exit(gnn_dti::cli::run(std::env::args_os()));
}
