#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ananet {

// Base for every domain failure. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what, std::string hint = {})
      : std::runtime_error(what), hint_(std::move(hint)) {}

  // Remediation hint shown to CLI users; may be empty.
  const std::string& hint() const noexcept { return hint_; }

private:
  std::string hint_;
};

class EmptyStatus : public Error {
public:
  EmptyStatus() : Error("status text is empty after trimming") {}
};

class DanglingStatus : public Error {
public:
  DanglingStatus(const std::string& agent, const std::string& status)
      : Error("agent '" + agent + "' references undeclared status '" + status + "'"),
        agent_(agent), status_(status) {}
  const std::string& agent() const noexcept { return agent_; }
  const std::string& status() const noexcept { return status_; }

private:
  std::string agent_;
  std::string status_;
};

class DuplicateAgent : public Error {
public:
  explicit DuplicateAgent(const std::string& name)
      : Error("agent name '" + name + "' is not unique within the network") {}
};

class UnknownSeed : public Error {
public:
  explicit UnknownSeed(const std::string& seed)
      : Error("seed status '" + seed + "' is not part of the network") {}
};

class SchemaError : public Error {
public:
  SchemaError(const std::string& path, const std::string& message)
      : Error("schema error at " + path + ": " + message,
              "check the document against the network format (format_version 1)"),
        path_(path) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

class NotExecutable : public Error {
public:
  NotExecutable(const std::string& agent, std::vector<std::string> missing)
      : Error(make_message(agent, missing)), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
  static std::string make_message(const std::string& agent, const std::vector<std::string>& missing) {
    std::string msg = "agent '" + agent + "' is not executable; missing:";
    for (const auto& m : missing) msg += " '" + m + "'";
    return msg;
  }
  std::vector<std::string> missing_;
};

class GoalNotInNetwork : public Error {
public:
  explicit GoalNotInNetwork(const std::string& goal)
      : Error("goal status '" + goal + "' is not part of the network",
              "pass a --goal that appears in the network's statuses") {}
};

class SearchBudgetExceeded : public Error {
public:
  explicit SearchBudgetExceeded(std::size_t states)
      : Error("breadth-first search exceeded its state budget of " + std::to_string(states)) {}
};

class BackendError : public Error {
public:
  using Error::Error;
};

class TransportError : public BackendError {
public:
  explicit TransportError(const std::string& what)
      : BackendError("transport error: " + what,
                     "check ANANET_LLM_ENDPOINT / ANANET_LLM_API_KEY or use --backend replay") {}
};

class FixtureMiss : public BackendError {
public:
  FixtureMiss(const std::string& template_id, const std::string& digest, const std::string& params = {})
      : BackendError("no recorded completion for template '" + template_id + "' (digest " + digest + ")" +
                         (params.empty() ? "" : " with " + params),
                     "record the missing request with --backend record, or add a fixture file"),
        template_id_(template_id), digest_(digest) {}
  const std::string& template_id() const noexcept { return template_id_; }
  const std::string& digest() const noexcept { return digest_; }

private:
  std::string template_id_;
  std::string digest_;
};

class UnknownTemplate : public BackendError {
public:
  explicit UnknownTemplate(const std::string& id) : BackendError("unknown prompt template '" + id + "'") {}
};

class ShapeError : public Error {
public:
  ShapeError(const std::string& expected, const std::string& span)
      : Error("could not parse completion as " + expected + " near: \"" + span + "\""), span_(span) {}
  const std::string& span() const noexcept { return span_; }

private:
  std::string span_;
};

// Raised by the generator once retries are exhausted on unparsable completions.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::string response)
      : Error(what), response_(std::move(response)) {}
  const std::string& response() const noexcept { return response_; }

private:
  std::string response_;
};

class InvalidAgent : public Error {
public:
  InvalidAgent(const std::string& what, std::vector<std::string> violations)
      : Error(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  std::vector<std::string> violations_;
};

class StalePlanError : public Error {
public:
  explicit StalePlanError(const std::string& node)
      : Error("merge plan references '" + node + "', which is not in the network",
              "recompute the merge plan against the current network") {}
};

class InvalidTrials : public Error {
public:
  InvalidTrials() : Error("trial count must be at least 1") {}
};

class InvalidConfig : public Error {
public:
  using Error::Error;
};

}  // namespace ananet
