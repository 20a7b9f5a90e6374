fn main() {
    std::process::exit(formalpatch_workbench::run(std::env::args_os()));
}
