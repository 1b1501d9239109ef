//! Prints the built-in link-budget parameters in the file format.

fn main() {
    print!("{}", owpan::params::LinkBudgetParams::default().to_file_string());
}
