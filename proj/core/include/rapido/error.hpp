#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rapido {

enum class ErrorCode {
  // topology
  MalformedSnapshot,
  DanglingEndpoint,
  InfeasibleShape,
  InsufficientBalance,
  UnknownNode,
  UnknownChannel,
  // routing
  NoCandidatePath,
  StaleRoute,
  NoRoute,
  InvalidRoute,
  // vdp
  ZeroDeposit,
  EmptySolution,
  NoFeasibleSplit,
  InvalidInstance,
  // ledger / dhtlc
  InsufficientOnChainFunds,
  InvalidChannel,
  ChannelBusy,
  RouteInfeasible,
  OutOfSequence,
  TimelockNotDecreasing,
  ContractMissing,
  AlreadyTerminal,
  BadPreimage,
  Expired,
  NotYetExpired,
  NotAborted,
  // metrics
  PaymentExceedsOutbound,
  EmptySampleSet,
  EmptyOutcomeSet,
  // experiments / config
  ConfigMismatch,
  BadConfig,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. Callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rapido
