#include "agtd/features.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>
#include <stdexcept>

#include "agtd/hashing.hpp"
#include "agtd/unicode.hpp"
#include "agtd/watermark.hpp"  // edit_distance

namespace agtd {

FeatureVector rewrite_features(const Document& original,
                               std::span<const std::string> rewrites) {
  if (rewrites.size() != kRaidarPrompts.size())
    throw std::invalid_argument(
        "rewrite_features: expected " +
        std::to_string(kRaidarPrompts.size()) + " rewrites, got " +
        std::to_string(rewrites.size()));
  const auto original_chars =
      static_cast<double>(decode_utf8(original.text).size());
  const double denom = std::max(1.0, original_chars);
  FeatureVector fv;
  fv.doc_id = original.id;
  for (std::size_t i = 0; i < rewrites.size(); ++i) {
    fv.names.push_back("raidar_p" + std::to_string(i + 1));
    fv.values.push_back(
        static_cast<double>(edit_distance(original.text, rewrites[i])) /
        denom);
  }
  return fv;
}

namespace {

bool is_digit_cp(char32_t cp) {
  return (cp >= U'0' && cp <= U'9') || (cp >= U'०' && cp <= U'९');
}

char to_ascii_digit(char32_t cp) {
  if (cp >= U'0' && cp <= U'9') return static_cast<char>(cp);
  return static_cast<char>('0' + (cp - 0x0966));
}

bool is_group_separator(char32_t cp) {
  return cp == U'/' || cp == U':' || cp == U'-' || cp == U'.';
}

// Digit-run groups: maximal digit runs, merged across single /:-. separators
// that sit between digits ("12/05/2024" is one group).
std::vector<std::string> digit_groups(const std::vector<char32_t>& cps) {
  std::vector<std::string> groups;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_digit_cp(cps[i])) {
      ++i;
      continue;
    }
    std::string group;
    while (i < cps.size()) {
      if (is_digit_cp(cps[i])) {
        group.push_back(to_ascii_digit(cps[i]));
        ++i;
      } else if (is_group_separator(cps[i]) && i + 1 < cps.size() &&
                 is_digit_cp(cps[i + 1])) {
        group.push_back(static_cast<char>(cps[i]));
        ++i;
      } else {
        break;
      }
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

bool matches_datetime(const std::string& group) {
  static const std::regex kSlashDate(R"(\d{1,2}/\d{1,2}/\d{2,4})");
  static const std::regex kIsoDate(R"(\d{4}-\d{2}-\d{2})");
  static const std::regex kClockTime(R"(\d{1,2}:\d{2}(:\d{2})?)");
  return std::regex_match(group, kSlashDate) ||
         std::regex_match(group, kIsoDate) ||
         std::regex_match(group, kClockTime);
}

// Leading paragraph: text up to the first blank line (two newlines with only
// horizontal whitespace between), else the first sentence.
std::string leading_paragraph(const Document& doc) {
  const std::string& text = doc.text;
  std::size_t pos = 0;
  while ((pos = text.find('\n', pos)) != std::string::npos) {
    std::size_t next = pos + 1;
    while (next < text.size() && (text[next] == ' ' || text[next] == '\t' ||
                                  text[next] == '\r'))
      ++next;
    if (next < text.size() && text[next] == '\n')
      return text.substr(0, pos);
    pos = next;
  }
  const auto sentences = split_sentences(text);
  return sentences.empty() ? std::string{} : sentences.front();
}

}  // namespace

std::vector<std::string> stylometric_feature_names() {
  return {"mean_words_per_sentence", "leading_paragraph_words",
          "total_words",             "punct_density",
          "danda_density",           "comma_density",
          "digit_run_count",         "datetime_fraction"};
}

FeatureVector stylometric_features(const Document& doc) {
  const auto cps = decode_utf8(doc.text);
  const auto total_chars = static_cast<double>(cps.size());

  std::size_t total_words = 0;
  for (const auto& sentence : doc.sentences) total_words += sentence.size();
  const double mean_words =
      doc.sentences.empty()
          ? 0.0
          : static_cast<double>(total_words) / doc.sentences.size();

  const auto lead_words =
      static_cast<double>(tokenize(leading_paragraph(doc)).size());

  std::size_t punct = 0, danda = 0, comma = 0;
  for (char32_t cp : cps) {
    if (!is_word_cp(cp) && !is_space_cp(cp)) ++punct;
    if (cp == kDanda || cp == kDoubleDanda) ++danda;
    if (cp == U',') ++comma;
  }

  const auto groups = digit_groups(cps);
  std::size_t datetime = 0;
  for (const auto& g : groups) datetime += matches_datetime(g);

  FeatureVector fv;
  fv.doc_id = doc.id;
  fv.names = stylometric_feature_names();
  fv.values = {
      mean_words,
      lead_words,
      static_cast<double>(total_words),
      total_chars > 0 ? static_cast<double>(punct) / total_chars : 0.0,
      total_chars > 0 ? static_cast<double>(danda) / total_chars : 0.0,
      total_chars > 0 ? static_cast<double>(comma) / total_chars : 0.0,
      static_cast<double>(groups.size()),
      groups.empty() ? 0.0 : static_cast<double>(datetime) / groups.size(),
  };
  return fv;
}

// ---------------------------------------------------------------------------
// External rewriter
// ---------------------------------------------------------------------------

ExternalRewriter::ExternalRewriter(RewriterConfig config)
    : config_(std::move(config)) {
  if (config_.command_template.empty())
    throw std::invalid_argument("rewriter: command template not configured");
  if (config_.cache_dir.empty())
    throw std::invalid_argument("rewriter: cache directory not configured");
  std::filesystem::create_directories(config_.cache_dir);
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string substitute_prompt(const std::string& tmpl,
                              const std::string& prompt) {
  std::string cmd;
  std::size_t pos = 0;
  const std::string placeholder = "{prompt}";
  for (;;) {
    const std::size_t hit = tmpl.find(placeholder, pos);
    if (hit == std::string::npos) {
      cmd += tmpl.substr(pos);
      return cmd;
    }
    cmd += tmpl.substr(pos, hit - pos);
    cmd += shell_quote(prompt);
    pos = hit + placeholder.size();
  }
}

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

ProcessResult run_command(const std::string& command, const std::string& input,
                          double timeout_seconds) {
  // A child may exit before consuming its stdin; take EPIPE instead of
  // SIGPIPE.
  static const int sigpipe_ignored = [] {
    signal(SIGPIPE, SIG_IGN);
    return 0;
  }();
  (void)sigpipe_ignored;

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe))
    throw std::runtime_error("rewriter: pipe() failed");

  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("rewriter: fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(in_pipe[0]); close(in_pipe[1]);
    close(out_pipe[0]); close(out_pipe[1]);
    close(err_pipe[0]); close(err_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);

  ProcessResult result;
  std::size_t written = 0;
  bool stdin_open = true, stdout_open = true, stderr_open = true;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds);
  char buffer[4096];

  while (stdout_open || stderr_open) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      kill(pid, SIGKILL);
      result.timed_out = true;
      break;
    }
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);

    pollfd fds[3];
    nfds_t nfds = 0;
    int in_idx = -1, out_idx = -1, err_idx = -1;
    if (stdin_open && written < input.size()) {
      in_idx = nfds;
      fds[nfds++] = {in_pipe[1], POLLOUT, 0};
    } else if (stdin_open) {
      close(in_pipe[1]);
      stdin_open = false;
    }
    if (stdout_open) {
      out_idx = nfds;
      fds[nfds++] = {out_pipe[0], POLLIN, 0};
    }
    if (stderr_open) {
      err_idx = nfds;
      fds[nfds++] = {err_pipe[0], POLLIN, 0};
    }
    if (nfds == 0) break;

    const int rc = poll(fds, nfds, static_cast<int>(remaining.count()) + 1);
    if (rc < 0 && errno != EINTR)
      throw std::runtime_error("rewriter: poll() failed");
    if (rc <= 0) continue;

    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t w = write(in_pipe[1], input.data() + written,
                              std::min<std::size_t>(4096, input.size() - written));
      if (w > 0) {
        written += static_cast<std::size_t>(w);
        if (written == input.size()) {
          close(in_pipe[1]);
          stdin_open = false;
        }
      } else if (w < 0 && errno != EAGAIN && errno != EINTR) {
        close(in_pipe[1]);  // child closed its stdin; fine
        stdin_open = false;
      }
    }
    if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
      const ssize_t r = read(out_pipe[0], buffer, sizeof buffer);
      if (r > 0)
        result.out.append(buffer, static_cast<std::size_t>(r));
      else if (r == 0 || (r < 0 && errno != EAGAIN && errno != EINTR)) {
        close(out_pipe[0]);
        stdout_open = false;
      }
    }
    if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP))) {
      const ssize_t r = read(err_pipe[0], buffer, sizeof buffer);
      if (r > 0)
        result.err.append(buffer, static_cast<std::size_t>(r));
      else if (r == 0 || (r < 0 && errno != EAGAIN && errno != EINTR)) {
        close(err_pipe[0]);
        stderr_open = false;
      }
    }
  }

  if (stdin_open) close(in_pipe[1]);
  if (stdout_open) close(out_pipe[0]);
  if (stderr_open) close(err_pipe[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace

std::string ExternalRewriter::rewrite(const std::string& text,
                                      const std::string& prompt) {
  if (text.empty())
    throw std::invalid_argument("rewriter: text must be non-empty");

  const std::string cache_name =
      sha256_hex(text) + "_" + sha256_hex(prompt);
  const std::filesystem::path cache_path =
      std::filesystem::path(config_.cache_dir) / cache_name;

  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    std::ifstream cached(cache_path, std::ios::binary);
    if (cached) {
      return std::string((std::istreambuf_iterator<char>(cached)),
                         std::istreambuf_iterator<char>());
    }
  }

  const std::string command =
      substitute_prompt(config_.command_template, prompt);
  ProcessResult result;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    ++spawn_count_;
  }
  result = run_command(command, text, config_.timeout_seconds);

  if (result.timed_out)
    throw std::runtime_error("rewriter: command timed out after " +
                             std::to_string(config_.timeout_seconds) +
                             "s: " + command);
  if (result.exit_code != 0)
    throw std::runtime_error(
        "rewriter: command exited with status " +
        std::to_string(result.exit_code) + ": " + command +
        (result.err.empty() ? "" : " | stderr: " + result.err.substr(0, 512)));
  if (result.out.empty())
    throw std::runtime_error("rewriter: command produced no output: " +
                             command);

  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    const std::filesystem::path tmp = cache_path.string() + ".tmp";
    std::ofstream out(tmp, std::ios::binary);
    out << result.out;
    out.close();
    std::filesystem::rename(tmp, cache_path);
  }
  return result.out;
}

}  // namespace agtd
