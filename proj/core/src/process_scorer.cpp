#include "polyret/error.hpp"
#include "polyret/rerank.hpp"

#include <cerrno>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace polyret {

/// Bidirectional line channel to a child process. The child's stdin and
/// stdout are both ends of one Unix socket pair, which lets writes use
/// MSG_NOSIGNAL instead of touching the process-wide SIGPIPE disposition.
class ProcessScorer::Channel {
   public:
    Channel(std::string const &command, std::chrono::milliseconds timeout) : timeout_(timeout)
    {
        int fds[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
            throw ProtocolError(std::string("socketpair failed: ") + std::strerror(errno));
        }
        pid_ = ::fork();
        if (pid_ < 0) {
            ::close(fds[0]);
            ::close(fds[1]);
            throw ProtocolError(std::string("fork failed: ") + std::strerror(errno));
        }
        if (pid_ == 0) {
            ::dup2(fds[1], STDIN_FILENO);
            ::dup2(fds[1], STDOUT_FILENO);
            ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
            ::_exit(127);
        }
        ::close(fds[1]);
        fd_ = fds[0];
    }

    ~Channel()
    {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_WR);
        }
        reap();
        if (fd_ >= 0) {
            ::close(fd_);
        }
    }

    Channel(Channel const &) = delete;
    Channel &operator=(Channel const &) = delete;

    void send(std::string_view data)
    {
        while (!data.empty()) {
            auto const n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                throw ProtocolError(std::string("scorer closed its input: ") + std::strerror(errno));
            }
            data.remove_prefix(static_cast<std::size_t>(n));
        }
    }

    std::string receive_line()
    {
        while (true) {
            auto const newline = buffer_.find('\n');
            if (newline != std::string::npos) {
                std::string line = buffer_.substr(0, newline);
                buffer_.erase(0, newline + 1);
                if (!line.empty() && line.back() == '\r') {
                    line.pop_back();
                }
                return line;
            }
            pollfd pfd{fd_, POLLIN, 0};
            int const timeout_ms = timeout_.count() <= 0 ? -1 : static_cast<int>(timeout_.count());
            int const ready = ::poll(&pfd, 1, timeout_ms);
            if (ready < 0) {
                if (errno == EINTR) {
                    continue;
                }
                throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
            }
            if (ready == 0) {
                throw ProtocolError("scorer did not answer within " + std::to_string(timeout_.count()) + " ms");
            }
            char chunk[4096];
            auto const n = ::recv(fd_, chunk, sizeof(chunk), 0);
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                throw ProtocolError(std::string("read from scorer failed: ") + std::strerror(errno));
            }
            if (n == 0) {
                throw ProtocolError("scorer closed its output before answering");
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

   private:
    void reap()
    {
        if (pid_ <= 0) {
            return;
        }
        // Give the child a moment to exit after EOF, then stop it.
        for (int attempt = 0; attempt < 50; ++attempt) {
            int status = 0;
            pid_t const done = ::waitpid(pid_, &status, WNOHANG);
            if (done == pid_ || done < 0) {
                pid_ = -1;
                return;
            }
            ::usleep(20000);
        }
        ::kill(pid_, SIGKILL);
        int status = 0;
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
    }

    std::chrono::milliseconds timeout_;
    pid_t pid_ = -1;
    int fd_ = -1;
    std::string buffer_;
};

ProcessScorer::ProcessScorer(std::string command, std::size_t batch_size, std::chrono::milliseconds timeout)
    : channel_(std::make_unique<Channel>(command, timeout)), batch_size_(std::max<std::size_t>(1, batch_size))
{
    channel_->send("HELLO 1\n");
    auto const reply = channel_->receive_line();
    if (reply != "READY 1") {
        throw ProtocolError("scorer handshake failed: expected 'READY 1', got '" + reply + "'");
    }
}

ProcessScorer::~ProcessScorer() = default;

std::vector<double> ProcessScorer::score(std::span<PairInput const> pairs)
{
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (std::size_t start = 0; start < pairs.size(); start += batch_size_) {
        auto const end = std::min(pairs.size(), start + batch_size_);
        std::string batch;
        for (auto i = start; i < end; ++i) {
            batch += encode_score_request(pairs[i]);
            batch += '\n';
        }
        channel_->send(batch);
        for (auto i = start; i < end; ++i) {
            auto const line = channel_->receive_line();
            auto fields = split_on(line, '\t');
            auto const &expected = pairs[i];
            if (fields.size() != 3) {
                throw ProtocolError("malformed scorer response for (" + expected.qid + ", " + expected.docid +
                                    "): '" + line + "'");
            }
            if (unescape_field(fields[0]) != expected.qid || unescape_field(fields[1]) != expected.docid) {
                throw ProtocolError("scorer answered '" + line + "' to the request for (" + expected.qid + ", " +
                                    expected.docid + ")");
            }
            auto value = parse_real(trim(fields[2]));
            if (!value) {
                throw ProtocolError("scorer score '" + std::string(fields[2]) + "' for (" + expected.qid + ", " +
                                    expected.docid + ") is not a real");
            }
            scores.push_back(*value);
        }
    }
    return scores;
}

} // namespace polyret
