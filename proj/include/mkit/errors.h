#pragma once

#include <stdexcept>
#include <string>

namespace mkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input URI lacks a scheme/host or is otherwise not well formed.
class InvalidUri : public Error {
 public:
  using Error::Error;
};

// The resource answered but carries no Memento-Datetime.
class NotAMemento : public Error {
 public:
  using Error::Error;
};

class ConnectionFailed : public Error {
 public:
  using Error::Error;
};

class FetchTimeout : public Error {
 public:
  using Error::Error;
};

class MalformedTimeMap : public Error {
 public:
  using Error::Error;
};

class UnknownAlgorithm : public Error {
 public:
  using Error::Error;
};

class UnknownEndpoint : public Error {
 public:
  using Error::Error;
};

// A preference value that cannot be clamped into range (bad colormap, color).
class BadPreference : public Error {
 public:
  using Error::Error;
};

class UndecodableImage : public Error {
 public:
  using Error::Error;
};

class ProductUnsupported : public Error {
 public:
  using Error::Error;
};

class RendererUnavailable : public Error {
 public:
  using Error::Error;
};

class RenderTimeout : public Error {
 public:
  using Error::Error;
};

class DeadlineExceeded : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Story file that cannot be read as text lines or the JSON story schema.
class StoryError : public Error {
 public:
  using Error::Error;
};

// Template syntax errors and unknown variables; messages carry the line.
class TemplateError : public Error {
 public:
  using Error::Error;
};

// A post breaks a publisher limit (text length, media count).
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

class AuthFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace mkit
