//! Library code written in the language itself, loaded into every session.

/// Named snippets in load order. Each is one top-level declaration.
pub const PRELUDE: &[(&str, &str)] = &[
    (
        "receive",
        "let receive currency amount = scale amount (one currency)",
    ),
    (
        "european_stock_option",
        "\
let european_stock_option args =
  let first = stock_price args.effective_date args.company in
  let last = stock_price args.expiry_date args.company in
  let payoff = match args.call_or_put with
    | Call -> last / first - const args.strike
    | Put -> const args.strike - last / first
  in
  european args.expiry_date (receive args.currency payoff)",
    ),
    (
        "receive_dyn",
        "let receive_dyn currency amount = amount ** one currency",
    ),
    (
        "dyn_obs_mul_match",
        "\
let dyn_obs_mul_match (x : Obs Double) (y : ?) =
  match dynamic_to_type y with
    | TObsDouble -> (x * y : ?)
    | _ -> (scale x y : ?)",
    ),
];

/// The prelude as one listing.
pub fn prelude_source() -> String {
    PRELUDE
        .iter()
        .map(|(_, src)| *src)
        .collect::<Vec<_>>()
        .join("\n\n")
        + "\n"
}
