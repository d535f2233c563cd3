// Copyright 2026 The Jury Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JURY_ERRORS_H_
#define JURY_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace jury {

// Root of every error the library throws. Callers that only care about
// "something in the evaluation engine failed" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that violates a documented precondition or a config invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// ---- corpus -----------------------------------------------------------------

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public ValidationError {
 public:
  FormatError(std::size_t line_no, const std::string& what)
      : ValidationError("line " + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class DuplicateId : public ValidationError {
 public:
  explicit DuplicateId(std::string id)
      : ValidationError("duplicate id: " + id), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class MissingStudentAnswer : public ValidationError {
 public:
  explicit MissingStudentAnswer(const std::string& id)
      : ValidationError("record has no student answer: " + id) {}
};

class UngradedRecord : public ValidationError {
 public:
  explicit UngradedRecord(const std::string& id)
      : ValidationError("record is not graded: " + id) {}
};

class InsufficientRecords : public ValidationError {
 public:
  InsufficientRecords(std::string side, std::size_t have, std::size_t need)
      : ValidationError("not enough student-" + side + " records: have " +
                        std::to_string(have) + ", need " +
                        std::to_string(need)),
        side_(std::move(side)),
        have_(have),
        need_(need) {}
  const std::string& side() const { return side_; }
  std::size_t have() const { return have_; }
  std::size_t need() const { return need_; }

 private:
  std::string side_;
  std::size_t have_;
  std::size_t need_;
};

// ---- gateway ----------------------------------------------------------------

// Any failure talking to a model backend.
class BackendError : public Error {
 public:
  using Error::Error;
};

class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ExhaustedRetries : public BackendError {
 public:
  ExhaustedRetries(int last_status, int attempts)
      : BackendError("gave up after " + std::to_string(attempts) +
                     " attempts, last HTTP status " +
                     std::to_string(last_status)),
        last_status_(last_status),
        attempts_(attempts) {}
  int last_status() const { return last_status_; }
  int attempts() const { return attempts_; }

 private:
  int last_status_;
  int attempts_;
};

class Timeout : public BackendError {
 public:
  using BackendError::BackendError;
};

// ---- prompting / judge ------------------------------------------------------

class EmptyField : public ValidationError {
 public:
  explicit EmptyField(std::string which)
      : ValidationError("empty field: " + which), which_(std::move(which)) {}
  const std::string& which() const { return which_; }

 private:
  std::string which_;
};

class NoPeers : public ValidationError {
 public:
  NoPeers() : ValidationError("debate prompt needs at least one peer") {}
};

class UnknownProfile : public ValidationError {
 public:
  explicit UnknownProfile(const std::string& name)
      : ValidationError("unknown profile: " + name) {}
};

class NoMarker : public Error {
 public:
  NoMarker() : Error("no 'My Judgement: ###...###' marker in reply") {}
};

class UnrecognizedToken : public Error {
 public:
  explicit UnrecognizedToken(std::string token)
      : Error("unrecognized judgement token: '" + token + "'"),
        token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// ---- arena / leaderboard / maj ---------------------------------------------

class QuestionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingVerdict : public ValidationError {
 public:
  MissingVerdict(std::string judge, std::string question)
      : ValidationError("no verdict for judge '" + judge + "' on question '" +
                        question + "'"),
        judge_(std::move(judge)),
        question_(std::move(question)) {}
  const std::string& judge() const { return judge_; }
  const std::string& question() const { return question_; }

 private:
  std::string judge_;
  std::string question_;
};

class EmptySubset : public Error {
 public:
  explicit EmptySubset(std::string which)
      : Error("metric undefined on empty subset: " + which),
        which_(std::move(which)) {}
  const std::string& which() const { return which_; }

 private:
  std::string which_;
};

class DuplicateJudge : public ValidationError {
 public:
  explicit DuplicateJudge(const std::string& id)
      : ValidationError("duplicate judge: " + id) {}
};

class PanelTooSmall : public ValidationError {
 public:
  explicit PanelTooSmall(std::size_t size)
      : ValidationError("debate panel needs at least 2 agents, got " +
                        std::to_string(size)) {}
};

class MissingTieBreaker : public ValidationError {
 public:
  MissingTieBreaker()
      : ValidationError("tie policy meta_agent requires a tie-breaker agent") {}
};

class CoverageGap : public ValidationError {
 public:
  explicit CoverageGap(std::string question_id)
      : ValidationError("no debate transcript for question " + question_id),
        question_id_(std::move(question_id)) {}
  const std::string& question_id() const { return question_id_; }

 private:
  std::string question_id_;
};

// ---- pipeline ---------------------------------------------------------------

class MissingArtifact : public ValidationError {
 public:
  explicit MissingArtifact(std::string stage)
      : ValidationError("missing artifact from stage '" + stage + "'"),
        stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class ConfigMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace jury

#endif  // JURY_ERRORS_H_
