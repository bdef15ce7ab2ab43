fn main() -> std::process::ExitCode {
    supplier_dss::cli::main()
}
